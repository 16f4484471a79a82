"""Tour of the exponential-family building blocks.

Each column block of a mixed-type matrix carries one canonical-form model:
log-partition G, mean map G', curvature G'', per-entry negative
log-likelihood, Bregman divergence, and seeded sampling.
"""

import numpy as np

from mixedmc import (
    bernoulli,
    bregman,
    curvature,
    curvature_bounds,
    gamma,
    gaussian,
    log_partition,
    mean_map,
    negbin,
    nll_term,
    poisson,
    sample,
    theta_interval,
)

models = [gaussian(1.0), bernoulli(), poisson(), gamma(2.0), negbin(2.0)]

print("=== canonical calculus at theta = -0.5 ===")
for model in models:
    th = -0.5
    print(f"{model.token:12s} G = {log_partition(model, th):8.4f}   "
          f"G' (mean) = {mean_map(model, th):8.4f}   "
          f"G'' (variance) = {curvature(model, th):8.4f}")

print("\n=== the mean map inverts the likelihood ===")
# the per-entry loss G(theta) - y * theta bottoms out where G'(theta) = y
model = poisson()
y = 3.0
grid = np.linspace(-2, 3, 2001)
best = grid[np.argmin(nll_term(model, y, grid))]
print(f"poisson observation y = {y}: argmin of the loss is {best:.4f}, "
      f"log(y) = {np.log(y):.4f}")

print("\n=== Bregman divergence = within-family KL ===")
x, y = 0.7, -0.4
d = bregman(poisson(), x, y)
m1, m2 = np.exp(x), np.exp(y)
kl = m2 * np.log(m2 / m1) - m2 + m1
print(f"poisson d({x}, {y}) = {d:.6f}, KL(Poisson({m2:.3f}) || Poisson({m1:.3f})) = {kl:.6f}")

print("\n=== curvature bounds sandwich the divergence ===")
rng = np.random.default_rng(0)
for model in models:
    cb = curvature_bounds(model, gamma=1.0, k=1.0)
    lo, hi = theta_interval(model, 1.0, 1.0)
    a = rng.uniform(lo, hi, 1000)
    b = rng.uniform(lo, hi, 1000)
    twod = 2 * bregman(model, a, b)
    gap2 = (a - b) ** 2
    ok = np.all(cb.lower * gap2 <= twod + 1e-12) and np.all(twod <= cb.upper * gap2 + 1e-12)
    print(f"{model.token:12s} lower = {cb.lower:8.4f} upper = {cb.upper:8.4f} "
          f"sandwich holds on 1000 pairs: {ok}")

print("\n=== seeded sampling matches the mean map ===")
rng = np.random.default_rng(42)
for model in models:
    th = -0.5
    draws = sample(model, th, rng, size=200_000)
    print(f"{model.token:12s} model mean = {mean_map(model, th):8.4f}   "
          f"sample mean = {draws.mean():8.4f}")
