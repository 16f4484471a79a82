"""Closed-form tuning rules and recovery-bound expressions.

Diagnostic formulas accompanying the estimator: the penalty selection rule
``lambda_star``, the expected-spectral-norm bound for the Rademacher
sampling operator, the squared-error threshold ``beta``, and the right-hand
side of the Frobenius recovery guarantee.  The absolute constants in these
expressions are never instantiated by the theory, so they are exposed as
explicit knobs (``c_abs``, ``big_c_abs``, defaults 1) and the outputs are
reported alongside experiments as curves, never asserted against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expfam import CurvatureBounds


@dataclass(frozen=True)
class BoundInputs:
    """Problem-size and curvature summary feeding the bound formulas.

    ``l_gamma`` / ``u_gamma`` aggregate the per-block curvature bounds
    worst-case across blocks (smallest lower, largest upper); ``kappa``
    caps the ratio ``lambda_max / lambda_star``.
    """

    n1: int
    n2: int
    rank: int
    p: float
    gamma: float
    k: float
    l_gamma: float
    u_gamma: float
    kappa: float = 1.0
    c_abs: float = 1.0
    big_c_abs: float = 1.0

    def __post_init__(self):
        if min(self.n1, self.n2, self.rank) < 1:
            raise ValueError("n1, n2, rank must be >= 1")
        if not 0 < self.p <= 1:
            raise ValueError(f"p must be in (0, 1], got {self.p}")
        if min(self.gamma, self.k, self.l_gamma, self.u_gamma) <= 0:
            raise ValueError("gamma, k, l_gamma, u_gamma must be > 0")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")


def worst_case_bounds(bounds: list[CurvatureBounds]) -> tuple[float, float]:
    """Aggregate per-block curvature bounds: (min lower, max upper)."""
    if not bounds:
        raise ValueError("need at least one block's bounds")
    return min(b.lower for b in bounds), max(b.upper for b in bounds)


def lambda_star(inputs: BoundInputs, mode: str = "sum") -> float:
    """Nuclear-norm penalty selection rule.

        lambda_star = 2 c (U v K) (sqrt(n1 + n2) + log(n1 v n2)^{3/2}) / (n1 n2)

    The leading root appears in two variants that coincide up to sqrt(2):
    ``mode="sum"`` uses ``sqrt(n1 + n2)``, ``mode="max"`` substitutes
    ``sqrt(max(n1, n2))``.  Both are exposed because neither dominates the
    other's empirical behaviour; "sum" is the default.
    """
    big = max(inputs.n1, inputs.n2)
    if mode == "sum":
        root = np.sqrt(inputs.n1 + inputs.n2)
    elif mode == "max":
        root = np.sqrt(big)
    else:
        raise ValueError(f"mode must be 'sum' or 'max', got {mode!r}")
    u_or_k = max(inputs.u_gamma, inputs.k)
    return float(2.0 * inputs.c_abs * u_or_k * (root + np.log(big) ** 1.5) / (inputs.n1 * inputs.n2))


def sigma_r_bound(inputs: BoundInputs, mu: float) -> float:
    """Expected spectral norm of the Rademacher sampling operator.

        E||Sigma_R|| <= c (sqrt(mu) + sqrt(log(n1 ^ n2))) / (n1 n2).

    ``mu`` is the sampling-dependent leading term of the underlying
    concentration bound; it is never pinned down there, so it stays an
    explicit input here.
    """
    if mu < 0:
        raise ValueError(f"mu must be >= 0, got {mu}")
    small = min(inputs.n1, inputs.n2)
    return float(inputs.c_abs * (np.sqrt(mu) + np.sqrt(np.log(small))) / (inputs.n1 * inputs.n2))


def beta_threshold(inputs: BoundInputs, denom_d: float | None = None) -> float:
    """Squared-error threshold separating the two proof regimes.

        beta = 946 gamma^2 log(n1 + n2) / (p n1 D)

    ``D`` defaults to ``n2`` (the display leaves it undefined).
    """
    d = inputs.n2 if denom_d is None else denom_d
    if d <= 0:
        raise ValueError(f"denominator D must be > 0, got {d}")
    return float(946.0 * inputs.gamma**2 * np.log(inputs.n1 + inputs.n2) / (inputs.p * inputs.n1 * d))


def recovery_bound(inputs: BoundInputs) -> float:
    """Right-hand side of the normalized squared-Frobenius recovery guarantee.

        C rank (n1 v n2) / (p^2 n1 n2) * (1 + log^3(n1 v n2) / (n1 v n2))
          * ((U v K)^2 (1 + kappa L^2 + kappa^2 L^4) / L^4
             + gamma^2 (1 + kappa + kappa^2))

    with L, U the aggregated curvature bounds.  Returned value scales with
    the unknown absolute constant ``big_c_abs``; treat as a shape, not a
    certificate.
    """
    big = max(inputs.n1, inputs.n2)
    u_or_k = max(inputs.u_gamma, inputs.k)
    l2 = inputs.l_gamma**2
    kap = inputs.kappa
    curv_term = u_or_k**2 * (1.0 + kap * l2 + kap**2 * l2**2) / l2**2
    flat_term = inputs.gamma**2 * (1.0 + kap + kap**2)
    size = inputs.rank * big / (inputs.p**2 * inputs.n1 * inputs.n2)
    logs = 1.0 + np.log(big) ** 3 / big
    return float(inputs.big_c_abs * size * logs * (curv_term + flat_term))
