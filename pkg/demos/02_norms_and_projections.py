"""Matrix-norm and projection toolbox behind the solver.

Shows the nuclear / two-to-infinity norms, PSD projection in full and
truncated modes, the l-infinity proximal map, and tangent-space splitting
at a low-rank matrix.
"""

import numpy as np

from mixedmc import (
    EigMode,
    linf_prox,
    max_norm_upper,
    nuclear_norm,
    psd_project,
    tangent_project,
    tangent_project_perp,
    two_to_inf_norm,
)

rng = np.random.default_rng(1)

print("=== norms on a random rank-2 matrix ===")
a = rng.standard_normal((8, 2)) @ rng.standard_normal((2, 6))
print(f"nuclear        = {nuclear_norm(a):.4f}")
print(f"two-to-inf     = {two_to_inf_norm(a):.4f}")
print(f"max-norm upper = {max_norm_upper(a):.4f}   (<= frobenius {np.linalg.norm(a):.4f})")
print(f"sqrt(rank)*fro = {np.sqrt(2) * np.linalg.norm(a):.4f}   (>= nuclear)")

print("\n=== PSD projection ===")
s = rng.standard_normal((6, 6))
s = 0.5 * (s + s.T)
full = psd_project(s)
print("input eigenvalues:    ", np.round(np.linalg.eigvalsh(s), 3))
print("projected eigenvalues:", np.round(np.linalg.eigvalsh(full), 3))

# a truncated decomposition only keeps the leading part of the spectrum
big = rng.standard_normal((40, 4))
spiked = big @ big.T - 0.5 * np.eye(40)
trunc = psd_project(spiked, EigMode.truncated(6))
exact = psd_project(spiked, EigMode.full())
print(f"truncated-vs-full gap on a 4-spike matrix: "
      f"{np.linalg.norm(trunc - exact) / np.linalg.norm(exact):.2e}")

print("\n=== l-infinity prox ===")
c = np.array([3.0, 1.0, -0.5])
for beta in (0.0, 1.0, 10.0):
    print(f"prox(c, beta={beta:4.1f}) = {linf_prox(c, beta)}")

print("\n=== tangent-space splitting at a rank-2 point ===")
b = rng.standard_normal((8, 6))
pt = tangent_project(a, b)
pp = tangent_project_perp(a, b)
print(f"P_T(B) + P_T_perp(B) == B:  {np.allclose(pt + pp, b)}")
sv = np.linalg.svd(pt, compute_uv=False)
print(f"rank of P_T(B) = {np.sum(sv > 1e-8 * sv[0])}  (<= 2 * rank(A) = 4)")
print(f"additivity: ||A + P_perp(B-A)||_* - ||A||_* - ||P_perp(B-A)||_* = "
      f"{nuclear_norm(a + tangent_project_perp(a, b - a)) - nuclear_norm(a) - nuclear_norm(tangent_project_perp(a, b - a)):.2e}")
