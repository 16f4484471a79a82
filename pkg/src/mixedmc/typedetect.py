"""Automatic distribution detection for column blocks.

Classical goodness-of-fit tests lose discrimination at large sample sizes,
so detection combines a short decision tree over value structure with a
moment-generating-function proximity score:

    1. values contained in {0, 1}            -> bernoulli
    2. non-negative integers                 -> poisson when the sample
       dispersion var/mean is within ``d_tol`` of 1, else negbin
    3. strictly positive reals               -> gamma vs gaussian, whichever
       has the smaller MGF distance
    4. anything else                         -> gaussian

Scores are mean squared gaps between the empirical MGF and the fitted
model's MGF on a small grid of exponents (lower is better).  The tree
structure, ``d_tol``, the grid, and the tie-break order are configuration,
not claims.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, polygamma, psi

from .expfam import (
    BERNOULLI,
    GAMMA,
    GAUSSIAN,
    KINDS,
    NEGBIN,
    POISSON,
    ExpFamModel,
)

#: Tie-break (and reporting) order for candidate kinds.
CANDIDATE_ORDER = (GAUSSIAN, BERNOULLI, POISSON, GAMMA, NEGBIN)

#: Default dispersion tolerance for the poisson-vs-negbin split.
DISPERSION_TOL = 0.5

#: Default MGF exponent grid.
MGF_GRID = tuple(np.linspace(-0.2, 0.2, 11))

INTEGER_ATOL = 1e-9
MIN_VALUES = 30


class InsufficientDataError(ValueError):
    """Fewer values than detection needs."""


@dataclass(frozen=True)
class DetectionReport:
    """Detected kind, its MGF score, fired rules, and fitted parameters."""

    kind: str
    score: float
    rule_path: tuple[str, ...]
    params: dict

    def to_text(self) -> str:
        rules = ";".join(self.rule_path)
        params = ",".join(f"{k}:{v:.6g}" for k, v in sorted(self.params.items()))
        return f"kind={self.kind} score={self.score:.6g} rules={rules} params={params}"


def fit_mle(kind: str, values) -> dict:
    """Maximum-likelihood parameters of ``kind`` for the given sample.

    gaussian -> mean/variance, bernoulli -> p, poisson -> rate,
    gamma -> shape (Newton on the digamma equation) and scale,
    negbin -> size (profile likelihood on a log grid, locally refined)
    and p.
    """
    x = np.asarray(values, float)
    if x.size == 0:
        raise InsufficientDataError("empty sample")
    mean = float(x.mean())
    if kind == GAUSSIAN:
        return {"mean": mean, "variance": float(x.var())}
    if kind == BERNOULLI:
        return {"p": mean}
    if kind == POISSON:
        return {"rate": mean}
    if kind == GAMMA:
        shape = _fit_gamma_shape(x)
        return {"shape": shape, "scale": mean / shape}
    if kind == NEGBIN:
        size = _fit_negbin_size(x)
        return {"size": size, "p": size / (size + mean)}
    raise ValueError(f"unknown kind {kind!r}")


def _fit_gamma_shape(x, iters: int = 25) -> float:
    if np.any(x <= 0):
        raise ValueError("gamma MLE needs strictly positive values")
    s = float(np.log(x.mean()) - np.log(x).mean())
    if s <= 0:  # degenerate (near-constant) sample
        return 1e6
    shape = (3.0 - s + np.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    for _ in range(iters):
        num = np.log(shape) - psi(shape) - s
        den = 1.0 / shape - polygamma(1, shape)
        step = num / den
        shape = max(shape - step, 1e-8)
        if abs(step) < 1e-12 * (1.0 + shape):
            break
    return float(shape)


def _negbin_nll(x, size: float) -> float:
    # profile likelihood: p is pinned by the mean for fixed size
    mean = x.mean()
    p = size / (size + mean)
    ll = (
        gammaln(x + size).sum()
        - x.size * gammaln(size)
        - gammaln(x + 1.0).sum()
        + x.size * size * np.log(p)
        + x.sum() * np.log1p(-p)
    )
    return float(-ll)


def _fit_negbin_size(x) -> float:
    mean = x.mean()
    var = x.var()
    if mean <= 0:
        raise ValueError("negbin MLE needs a positive sample mean")
    # moment start when overdispersed, else generic
    start = mean**2 / (var - mean) if var > mean else 10.0
    grid = np.unique(np.concatenate([
        np.exp(np.linspace(np.log(0.05), np.log(500.0), 40)),
        [max(start, 1e-3)],
    ]))
    losses = [_negbin_nll(x, r) for r in grid]
    best = grid[int(np.argmin(losses))]
    lo, hi = best / 3.0, best * 3.0
    for _ in range(60):  # golden-section refine
        m1 = lo + 0.382 * (hi - lo)
        m2 = lo + 0.618 * (hi - lo)
        if _negbin_nll(x, m1) <= _negbin_nll(x, m2):
            hi = m2
        else:
            lo = m1
        if hi - lo < 1e-8 * (1.0 + hi):
            break
    return float(0.5 * (lo + hi))


def model_from_fit(kind: str, params: dict) -> tuple[ExpFamModel, float]:
    """Exponential-family model and canonical parameter matching an MLE fit."""
    if kind == GAUSSIAN:
        return ExpFamModel(GAUSSIAN, params["variance"]), params["mean"] / params["variance"]
    if kind == BERNOULLI:
        p = min(max(params["p"], 1e-12), 1 - 1e-12)
        return ExpFamModel(BERNOULLI), float(np.log(p / (1 - p)))
    if kind == POISSON:
        return ExpFamModel(POISSON), float(np.log(max(params["rate"], 1e-300)))
    if kind == GAMMA:
        return ExpFamModel(GAMMA, params["shape"]), -1.0 / params["scale"]
    if kind == NEGBIN:
        return ExpFamModel(NEGBIN, params["size"]), float(np.log1p(-params["p"]))
    raise ValueError(f"unknown kind {kind!r}")


def _model_mgf(kind: str, params: dict, t: np.ndarray) -> np.ndarray:
    if kind == GAUSSIAN:
        return np.exp(params["mean"] * t + 0.5 * params["variance"] * t**2)
    if kind == BERNOULLI:
        return 1.0 - params["p"] + params["p"] * np.exp(t)
    if kind == POISSON:
        return np.exp(params["rate"] * np.expm1(t))
    if kind == GAMMA:
        return (1.0 - params["scale"] * t) ** (-params["shape"])
    if kind == NEGBIN:
        p = params["p"]
        return (p / (1.0 - (1.0 - p) * np.exp(t))) ** params["size"]
    raise ValueError(f"unknown kind {kind!r}")


def _mgf_domain_mask(kind: str, params: dict, t: np.ndarray) -> np.ndarray:
    if kind == GAMMA:
        return t < 1.0 / params["scale"] * 0.999
    if kind == NEGBIN:
        return t < -np.log1p(-params["p"]) * 0.999
    return np.ones_like(t, bool)


def mgf_distance(values, kind: str, params: dict, grid=MGF_GRID) -> float:
    """Mean squared gap between empirical and model MGF on the grid.

    Grid points outside the model MGF's domain are clipped away; an empty
    grid (before clipping) is an error.  Points where either side
    overflows double precision are dropped as well; if none survive the
    distance is infinite, which ranks the kind last.
    """
    t = np.asarray(grid, float)
    if t.size == 0:
        raise ValueError("empty MGF grid")
    t = t[_mgf_domain_mask(kind, params, t)]
    if t.size == 0:
        raise ValueError(f"no grid point inside the {kind} MGF domain")
    x = np.asarray(values, float)
    with np.errstate(over="ignore", invalid="ignore"):
        empirical = np.exp(np.outer(t, x)).mean(axis=1)
        model = _model_mgf(kind, params, t)
        finite = np.isfinite(empirical) & np.isfinite(model)
        if not finite.any():
            return float("inf")
        return float(np.mean((empirical[finite] - model[finite]) ** 2))


def _scored(kind: str, values, rules: tuple[str, ...], grid) -> DetectionReport:
    params = fit_mle(kind, values)
    score = mgf_distance(values, kind, params, grid)
    return DetectionReport(kind=kind, score=score, rule_path=rules, params=params)


def detect(values, candidates=KINDS, d_tol: float = DISPERSION_TOL,
           grid=MGF_GRID) -> DetectionReport:
    """Run the decision tree and return the best-fitting kind.

    Requires at least 30 finite values.  ``candidates`` restricts the
    admissible kinds; rules whose target is excluded fall through.  Ties in
    MGF score break by the fixed candidate order (gaussian first).
    """
    x = np.asarray(values, float).ravel()
    if x.size < MIN_VALUES:
        raise InsufficientDataError(f"need >= {MIN_VALUES} values, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("values must be finite")
    candidates = [k for k in CANDIDATE_ORDER if k in candidates]
    if not candidates:
        raise ValueError("empty candidate set")

    rules: list[str] = []
    is_binary = bool(np.all((x == 0.0) | (x == 1.0)))
    if is_binary and BERNOULLI in candidates:
        rules.append("binary-values")
        return _scored(BERNOULLI, x, tuple(rules), grid)

    is_counts = bool(
        np.all(np.abs(x - np.round(x)) <= INTEGER_ATOL) and np.all(x >= 0)
    )
    if is_counts and (POISSON in candidates or NEGBIN in candidates):
        rules.append("nonneg-integers")
        mean = x.mean()
        dispersion = x.var() / mean if mean > 0 else 1.0
        near_one = abs(dispersion - 1.0) <= d_tol
        if near_one and POISSON in candidates:
            rules.append("dispersion-near-1")
            return _scored(POISSON, x, tuple(rules), grid)
        if not near_one and NEGBIN in candidates:
            rules.append("overdispersed" if dispersion > 1 else "underdispersed")
            return _scored(NEGBIN, x, tuple(rules), grid)
        rules.append("count-fallback")
        kind = POISSON if POISSON in candidates else NEGBIN
        return _scored(kind, x, tuple(rules), grid)

    if np.all(x > 0) and (GAMMA in candidates or GAUSSIAN in candidates):
        rules.append("positive-reals")
        reports = [
            _scored(kind, x, tuple(rules) + (f"mgf-{kind}",), grid)
            for kind in (GAUSSIAN, GAMMA)
            if kind in candidates
        ]
        return min(reports, key=lambda rep: rep.score)

    rules.append("fallback")
    for kind in candidates:
        if kind == BERNOULLI and not is_binary:
            continue
        if kind in (GAMMA,) and np.any(x <= 0):
            continue
        if kind in (POISSON, NEGBIN) and np.any(x < 0):
            continue
        return _scored(kind, x, tuple(rules), grid)
    raise ValueError("no admissible candidate for these values")
