"""Complete one mixed-type matrix end to end.

Generates a rank-3 truth with five typed column blocks, hides 20% of the
entries, runs the ADMM solver, and reports per-block recovery along with
the residual trace.
"""

import numpy as np

from mixedmc import (
    AdmmConfig,
    ColumnBlockLayout,
    SamplingScheme,
    bernoulli,
    datagen,
    gamma,
    gaussian,
    negbin,
    poisson,
    relative_error,
    solve,
)

layout = ColumnBlockLayout(50, (
    (gaussian(1.0), 10),
    (bernoulli(), 10),
    (poisson(), 10),
    (gamma(2.0), 10),
    (negbin(2.0), 10),
))
GAMMA = 6.0

inst = datagen.make_instance(layout, rank=3, gamma=GAMMA,
                             scheme=SamplingScheme.uniform(0.8), seed=0)
print(f"instance: {layout.n1}x{layout.n2}, rank target {inst.rank_target}, "
      f"{inst.mask.mean():.0%} observed, blocks shifted for negative domains: "
      f"{inst.shifted_blocks}")

config = AdmmConfig(mu=1.5e-3, lam=3e-3, alpha=GAMMA, tol=1e-6, max_iter=4000)
result = solve(inst.y_observed, inst.mask, layout, config)

print(f"\nconverged={result.converged} after {result.iterations} iterations "
      f"(r_p={result.primal_residual:.2e}, r_d={result.dual_residual:.2e})")

overall, per_block = relative_error(result.theta_hat, inst.theta_true, layout)
print(f"overall relative error: {overall:.3f}")
for (model, _), err in zip(layout.blocks, per_block):
    print(f"  {model.token:12s} {err:.3f}")

# the completed matrix lives on the data (mean) scale
print("\nfirst row, canonical vs completed (mean scale):")
print("  theta_hat:", np.round(result.theta_hat[0, :5], 2))
print("  completed:", np.round(result.completed[0, :5], 2))

# residual history: primal and dual gaps with the adapted penalty
trace = result.trace
print("\niter    r_p        r_d        rho")
for t in (0, 9, 99, len(trace) - 1):
    if t < len(trace):
        print(f"{t + 1:5d}  {trace[t, 0]:.3e}  {trace[t, 1]:.3e}  {trace[t, 2]:.3e}")
