"""ADMM solver for hybrid max-norm + nuclear-norm penalized likelihood.

The estimator is embedded in a symmetric ``d x d`` variable ``Z`` with
``d = n1 + n2``: the off-diagonal block ``Z12`` carries the canonical
parameter matrix, the trace penalty ``mu * <I, Z>`` stands in for the
nuclear norm, and ``lam * ||diag(Z)||_inf`` for the max norm.  Splitting
``X = Z`` with ``X`` constrained to the PSD cone gives the augmented
Lagrangian

    L(X, Z; W) = sum_obs [G(Z12_ij) - Y_ij Z12_ij] + lam ||diag Z||_inf
                 + mu <I, X> + <W, X - Z> + rho/2 ||X - Z||_F^2,

whose three-step iteration is implemented here:

    X-step   PSD projection (full or truncated eigendecomposition),
    Z-step   per observed entry a 1-D strictly convex prox solved by
             safeguarded Newton, an entrywise box clamp elsewhere, and an
             l-infinity prox on the diagonal,
    W-step   dual ascent with step length tau.

Early stopping monitors the primal gap ``||X - Z||_F`` and a dual gap built
from the optimality conditions; the penalty ``rho`` is rebalanced whenever
the two drift apart.

The likelihood term is normalized by the matrix size (it is the averaged
negative log-likelihood), keeping ``mu`` and ``lam`` on the same scale as
the estimator's penalties: ``mu = lambda_*/2`` and ``lam = lambda_max``.
Inside the Z-step this normalization surfaces as an inflated prox weight
``n1 * n2 * rho`` on each observed-entry subproblem.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import expfam
from .expfam import ExpFamModel
from .layout import ColumnBlockLayout
from .matnorm import EigMode, linf_prox, psd_project, symmetrize

RHO_MIN = 1e-6
RHO_MAX = 1e6

#: Consecutive near-zero relative changes of Z that trigger a stagnation stop.
STAGNATION_LIMIT = 20
STAGNATION_RTOL = 1e-12


class ConfigurationError(ValueError):
    """Invalid solver inputs detected before iterating."""


@dataclass(frozen=True)
class AdmmConfig:
    """Solver knobs.

    ``mu`` weighs the trace penalty (nuclear-norm surrogate), ``lam`` the
    diagonal l-infinity penalty (max-norm surrogate), ``alpha`` the
    entrywise box on the recovered block.  ``tau`` must stay below
    (1 + sqrt(5))/2; 1.618 is the empirically best step.
    """

    mu: float = 0.0
    lam: float = 0.0
    alpha: float = 10.0
    rho0: float = 0.1
    tau: float = 1.618
    tol: float = 1e-4
    max_iter: int = 2000
    eig_mode: EigMode = EigMode.full()
    adapt_rho: bool = True
    newton_tol: float = 1e-10
    newton_max: int = 50

    def __post_init__(self):
        if self.mu < 0 or self.lam < 0:
            raise ConfigurationError("mu and lam must be >= 0")
        if not self.alpha > 0:
            raise ConfigurationError(f"alpha must be > 0, got {self.alpha}")
        if not self.rho0 > 0:
            raise ConfigurationError(f"rho0 must be > 0, got {self.rho0}")
        if not 0 < self.tau < (1 + np.sqrt(5)) / 2:
            raise ConfigurationError(f"tau must be in (0, (1+sqrt(5))/2), got {self.tau}")
        if not self.tol > 0 or self.max_iter < 1:
            raise ConfigurationError("tol must be > 0 and max_iter >= 1")
        if not self.newton_tol > 0 or self.newton_max < 1:
            raise ConfigurationError("newton_tol must be > 0 and newton_max >= 1")


@dataclass
class AdmmState:
    """Iterates of one solve; owned exclusively by that solve."""

    x: np.ndarray
    z: np.ndarray
    w: np.ndarray
    rho: float
    t: int = 0
    history: list = field(default_factory=list)  # rows (r_p, r_d, rho)


@dataclass(frozen=True)
class CompletionResult:
    """Recovered canonical matrix plus mean-scale completion and trace."""

    theta_hat: np.ndarray
    completed: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    converged: bool
    trace: np.ndarray  # (iterations, 3): r_p, r_d, rho


def penalties_from_estimator(lambda_star: float, lambda_max: float) -> tuple[float, float]:
    """Map estimator-scale penalties to the embedded program's (mu, lam).

    The trace of the embedding upper-bounds twice the nuclear norm of the
    carried block, hence ``mu = lambda_star / 2``; the diagonal sup-norm
    matches the max norm one-for-one.
    """
    return 0.5 * lambda_star, lambda_max


def x_step(z, w, mu: float, rho: float, eig_mode: EigMode = EigMode.full()):
    """PSD projection of ``Z - (W + mu I) / rho``."""
    m = z - (w + mu * np.eye(z.shape[0])) / rho
    return psd_project(m, eig_mode)


def _entry_prox(model: ExpFamModel, y, c, rho: float, lo: float, hi: float,
                tol: float = 1e-10, max_iter: int = 50):
    """Vectorized minimizer of ``G(z) - y z + rho (z - c)^2`` over [lo, hi].

    The derivative ``g'(z) = G'(z) - y + 2 rho (z - c)`` is strictly
    increasing (``g'' = G'' + 2 rho > 0``), so each entry has a unique
    minimizer: a boundary point when ``g'`` does not change sign, else the
    interior root, found by Newton steps safeguarded by bisection on a
    sign-changing bracket.
    """
    y = np.asarray(y, float)
    c = np.asarray(c, float)
    y, c = np.broadcast_arrays(y, c)

    def gprime(z):
        return expfam.mean_map(model, z) - y + 2.0 * rho * (z - c)

    lob = np.full(c.shape, lo, dtype=float)
    hib = np.full(c.shape, hi, dtype=float)
    at_lo = gprime(lob) >= 0.0
    at_hi = gprime(hib) <= 0.0
    z = np.clip(c, lo, hi)
    z = np.where(at_lo, lo, np.where(at_hi, hi, z))
    free = ~(at_lo | at_hi)
    if not free.any():
        return z

    for _ in range(max_iter):
        g = gprime(z)
        active = free & (np.abs(g) > tol)
        if not active.any():
            break
        lob = np.where(active & (g < 0), z, lob)
        hib = np.where(active & (g > 0), z, hib)
        newton = z - g / (expfam.curvature(model, z) + 2.0 * rho)
        fallback = 0.5 * (lob + hib)
        inside = (newton > lob) & (newton < hib)
        z = np.where(active, np.where(inside, newton, fallback), z)
    return z


def z12_entry_solve(model: ExpFamModel, y: float, c: float, rho: float,
                    alpha: float, newton_tol: float = 1e-10,
                    newton_max: int = 50) -> float:
    """Single observed-entry update of the carried block.

    Minimizes ``G(z) - y z + rho (z - c)^2`` over the box [-alpha, alpha]
    intersected with the model's canonical domain.  At interior solutions
    the first-order condition holds to ``newton_tol``; otherwise the
    returned boundary has an inward-pointing derivative sign.
    """
    if not rho > 0:
        raise ValueError(f"rho must be > 0, got {rho}")
    lo, hi = model.domain(alpha)
    return float(_entry_prox(model, y, c, rho, lo, hi, newton_tol, newton_max))


def z_step(state: AdmmState, y, mask, layout: ColumnBlockLayout, config: AdmmConfig):
    """Blockwise closed-form/Newton minimizer of the Z subproblem.

    With ``C = X + W / rho``: observed entries of the carried block solve
    the per-entry likelihood prox, unobserved ones clamp to the box, the
    off-diagonal parts of both diagonal blocks copy ``C``, and the matrix
    diagonal takes the l-infinity prox at level ``lam / rho``.

    Because the likelihood is averaged over the matrix size, the per-entry
    prox weight is ``n1 * n2 * rho`` (an observed entry's unnormalized
    subproblem ``G(z) - y z + n1 n2 rho (z - c)^2``).
    """
    n1, n2 = layout.shape
    c = symmetrize(state.x + state.w / state.rho)
    z = c.copy()
    c12 = c[:n1, n1:]
    z12 = np.empty_like(c12)
    rho_entry = state.rho * n1 * n2
    for _, model, cols in layout.block_slices():
        lo, hi = model.domain(config.alpha)
        cb = c12[:, cols]
        zb = np.clip(cb, lo, hi)
        mb = np.asarray(mask[:, cols], bool)
        if mb.any():
            yb = np.asarray(y[:, cols], float)
            zb[mb] = _entry_prox(model, yb[mb], cb[mb], rho_entry, lo, hi,
                                 config.newton_tol, config.newton_max)
        z12[:, cols] = zb
    z[:n1, n1:] = z12
    z[n1:, :n1] = z12.T
    np.fill_diagonal(z, linf_prox(np.diag(c), config.lam / state.rho))
    return z


def dual_step(w, x, z, tau: float, rho: float):
    """Dual ascent ``W + tau rho (X - Z)``."""
    return w + tau * rho * (x - z)


def residuals(state: AdmmState, z_prev, tau: float) -> tuple[float, float]:
    """Primal and dual gaps after a full X/Z/W update.

    ``r_p = ||X - Z||_F``.  With the unrelaxed multiplier
    ``W~ = W_prev + rho (X - Z) = W + (1 - tau) rho (X - Z)``,

        r_d = max(||W~ - W||_F, ||rho (Z_prev - Z) + W - W~||_F),

    which vanishes exactly at a fixed point.  Callers normalize by
    ``1 + ||Z||_F`` before comparing against the tolerance.
    """
    gap = state.x - state.z
    r_p = float(np.linalg.norm(gap))
    drift = (1.0 - tau) * state.rho * gap  # = W~ - W
    r_d1 = float(np.linalg.norm(drift))
    r_d2 = float(np.linalg.norm(state.rho * (z_prev - state.z) - drift))
    return r_p, max(r_d1, r_d2)


def balance_gap(rho: float, r_p: float, r_d: float) -> float:
    """Shrink rho when the primal gap leads, grow it when the dual leads."""
    if r_p < 0.5 * r_d:
        rho = 0.7 * rho
    elif r_d < 0.5 * r_p:
        rho = 1.3 * rho
    return float(np.clip(rho, RHO_MIN, RHO_MAX))


def _validate_inputs(y, mask, layout):
    y = np.asarray(y, float)
    mask = np.asarray(mask, bool)
    if y.shape != layout.shape:
        raise ConfigurationError(f"data shape {y.shape} != layout shape {layout.shape}")
    if mask.shape != layout.shape:
        raise ConfigurationError(f"mask shape {mask.shape} != layout shape {layout.shape}")
    if not np.all(np.isfinite(y[mask])):
        raise ConfigurationError("observed entries must be finite")
    if not mask.any():
        raise ConfigurationError("mask has zero observed entries")
    return y, mask


def solve(y, mask, layout: ColumnBlockLayout, config: AdmmConfig = AdmmConfig(),
          callback=None) -> CompletionResult:
    """Run the ADMM loop and read the completion off the final iterate.

    Parameters
    ----------
    y : (n1, n2) array
        Observed data; entries outside ``mask`` are ignored.
    mask : (n1, n2) boolean array
        Observation indicators.
    layout : ColumnBlockLayout
        Column typing; must match the data shape.
    config : AdmmConfig
        Penalties and iteration controls.
    callback : callable, optional
        Invoked as ``callback(state)`` after each iteration (testing hook).

    Returns
    -------
    CompletionResult
        Canonical-parameter estimate (the final carried block, clamped to
        the box), its mean-scale completion, and the residual trace.
    """
    y, mask = _validate_inputs(y, mask, layout)
    n1, n2 = layout.shape
    d = n1 + n2
    state = AdmmState(x=np.eye(d), z=np.eye(d), w=np.zeros((d, d)), rho=config.rho0)

    converged = False
    stagnant = 0
    r_p = r_d = np.inf
    for _ in range(config.max_iter):
        z_prev = state.z
        state.x = x_step(state.z, state.w, config.mu, state.rho, config.eig_mode)
        state.z = z_step(state, y, mask, layout, config)
        state.w = dual_step(state.w, state.x, state.z, config.tau, state.rho)
        state.t += 1
        r_p, r_d = residuals(state, z_prev, config.tau)
        state.history.append((r_p, r_d, state.rho))
        if callback is not None:
            callback(state)

        scale = 1.0 + float(np.linalg.norm(state.z))
        if max(r_p, r_d) / scale < config.tol:
            converged = True
            break
        if np.linalg.norm(state.z - z_prev) / scale < STAGNATION_RTOL:
            stagnant += 1
            if stagnant >= STAGNATION_LIMIT:
                break
        else:
            stagnant = 0
        if config.adapt_rho:
            state.rho = balance_gap(state.rho, r_p, r_d)

    z12 = state.z[:n1, n1:]
    theta_hat = np.empty_like(z12)
    completed = np.empty_like(z12)
    for _, model, cols in layout.block_slices():
        lo, hi = model.domain(config.alpha)
        theta_hat[:, cols] = np.clip(z12[:, cols], lo, hi)
        completed[:, cols] = expfam.mean_map(model, theta_hat[:, cols])
    return CompletionResult(
        theta_hat=theta_hat,
        completed=completed,
        iterations=state.t,
        primal_residual=r_p,
        dual_residual=r_d,
        converged=converged,
        trace=np.asarray(state.history, dtype=float),
    )
