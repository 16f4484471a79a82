"""Matrix norms, spectral projections, and the l-infinity proximal map.

Linear-algebra substrate for the semidefinite-embedding solver: nuclear and
two-to-infinity norms, projection onto the positive-semidefinite cone (full
or truncated eigendecomposition), tangent-space projections at a low-rank
point, the proximal operator of ``beta * ||.||_inf``, and entrywise box
clamping.  Everything is a pure function over ndarrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

#: Relative singular-value cutoff for numerical rank decisions.
RANK_RTOL = 1e-8


class EigenSolverError(RuntimeError):
    """Truncated eigensolver failed to converge; carries diagnostics."""


@dataclass(frozen=True)
class EigMode:
    """Eigendecomposition strategy for PSD projections.

    ``k is None`` means a full decomposition; otherwise only the ``k``
    algebraically largest eigenpairs are computed, giving a PSD result that
    is only approximately nearest when the input has more than ``k``
    positive eigenvalues.
    """

    k: int | None = None

    def __post_init__(self):
        if self.k is not None and self.k < 1:
            raise ValueError(f"truncated mode needs k >= 1, got {self.k}")

    @classmethod
    def full(cls) -> "EigMode":
        return cls(None)

    @classmethod
    def truncated(cls, k: int) -> "EigMode":
        return cls(k)

    @classmethod
    def default_truncated(cls, dim: int) -> "EigMode":
        """Truncated mode at 10% of the dimension (at least one pair)."""
        return cls(max(1, int(np.ceil(dim / 10))))

    @property
    def is_full(self) -> bool:
        return self.k is None

    @property
    def token(self) -> str:
        return "full" if self.is_full else f"trunc:{self.k}"

    @classmethod
    def from_token(cls, token: str) -> "EigMode":
        token = token.strip().lower()
        if token == "full":
            return cls.full()
        name, sep, k = token.partition(":")
        if name == "trunc" and sep:
            return cls.truncated(int(k))
        raise ValueError(f"bad eig mode {token!r}; expected 'full' or 'trunc:K'")


def nuclear_norm(a) -> float:
    """Sum of singular values."""
    return float(np.linalg.svd(np.asarray(a, float), compute_uv=False).sum())


def two_to_inf_norm(a) -> float:
    """Operator norm from l2 to l-infinity: the largest row l2-norm."""
    a = np.atleast_2d(np.asarray(a, float))
    return float(np.sqrt((a**2).sum(axis=1).max()))


def max_norm_upper(a) -> float:
    """Upper bound on the matrix max norm.

    The exact max norm (a minimum over factorizations) is NP-hard to
    compute; this returns the two-to-infinity norm, which dominates it and
    is itself dominated by the Frobenius norm.
    """
    return two_to_inf_norm(a)


def symmetrize(s):
    return 0.5 * (np.asarray(s, float) + np.asarray(s, float).T)


def psd_project(s, mode: EigMode = EigMode.full()):
    """Project a symmetric matrix onto the positive-semidefinite cone.

    Full mode clamps negative eigenvalues to zero, yielding the nearest PSD
    matrix in Frobenius norm.  Truncated mode rebuilds from the ``k``
    algebraically largest eigenpairs (negative ones clamped); the result is
    PSD but only approximately nearest.

    Raises
    ------
    EigenSolverError
        If the truncated (Lanczos) solver does not converge.
    """
    s = symmetrize(s)
    n = s.shape[0]
    # ARPACK requires k < n and struggles on tiny problems; fall back to full.
    if mode.is_full or mode.k >= n or n < 4:
        vals, vecs = np.linalg.eigh(s)
    else:
        try:
            vals, vecs = spla.eigsh(s, k=mode.k, which="LA")
        except spla.ArpackNoConvergence as err:
            raise EigenSolverError(
                f"eigsh(k={mode.k}, n={n}) did not converge: "
                f"{len(err.eigenvalues)} of {mode.k} pairs after max iterations"
            ) from err
    pos = np.clip(vals, 0.0, None)
    keep = pos > 0
    out = (vecs[:, keep] * pos[keep]) @ vecs[:, keep].T
    return symmetrize(out)


def project_l1_ball(v, radius: float):
    """Euclidean projection of a vector onto the l1 ball of given radius."""
    v = np.asarray(v, float)
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    mag = np.abs(v)
    if mag.sum() <= radius:
        return v.copy()
    if radius == 0:
        return np.zeros_like(v)
    u = np.sort(mag)[::-1]
    cumsum = np.cumsum(u)
    idx = np.arange(1, u.size + 1)
    rho = np.max(idx[u * idx > cumsum - radius])
    tau = (cumsum[rho - 1] - radius) / rho
    return np.sign(v) * np.maximum(mag - tau, 0.0)


def linf_prox(c, beta: float):
    """Exact minimizer of ``beta * ||z||_inf + 0.5 * ||c - z||_2^2``.

    Computed by Moreau decomposition against the l1 ball: the prox equals
    ``c`` minus the projection of ``c`` onto the l1 ball of radius beta.
    Handles arbitrary signs, and returns 0 whenever ``||c||_1 <= beta``
    (the sorted closed form's fallback average would go negative there).
    """
    c = np.asarray(c, float)
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    if beta == 0:
        return c.copy()
    return c - project_l1_ball(c, beta)


def linf_ball_project(x, alpha: float):
    """Entrywise clamp to the box [-alpha, alpha]."""
    if not alpha > 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    return np.clip(np.asarray(x, float), -alpha, alpha)


def _singular_subspaces(a):
    u, s, vt = np.linalg.svd(np.asarray(a, float), full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        r = 0
    else:
        r = int(np.sum(s > RANK_RTOL * s[0]))
    return u[:, :r], vt[:r, :].T


def tangent_project(a, b):
    """Projection of ``b`` onto the tangent space of low-rank matrices at ``a``.

    With U, V spanning the column/row spaces of ``a``,

        P_T(B) = P_U B + B P_V - P_U B P_V,

    whose rank never exceeds twice the rank of ``a``.
    """
    b = np.asarray(b, float)
    u, v = _singular_subspaces(a)
    pub = u @ (u.T @ b)
    bpv = (b @ v) @ v.T
    return pub + bpv - (u @ (u.T @ bpv))


def tangent_project_perp(a, b):
    """Complementary projection (I - P_U) B (I - P_V); satisfies P_T + P_T_perp = I."""
    b = np.asarray(b, float)
    u, v = _singular_subspaces(a)
    res = b - u @ (u.T @ b)
    return res - (res @ v) @ v.T
