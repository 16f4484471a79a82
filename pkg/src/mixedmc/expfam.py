"""One-parameter exponential families in canonical form.

Every column block of the data matrix is modelled by a distribution of the
form

    p(x | theta) = h(x) exp(x * theta - G(theta)),

where ``theta`` is the canonical parameter and ``G`` the log-partition
function.  The mean and variance of the sufficient statistic are the first
and second derivatives of ``G``, so the whole per-entry calculus (negative
log-likelihood, Bregman divergence, curvature bounds) reduces to evaluating
``G`` and its derivatives.

Supported kinds and their canonical parametrizations:

    gaussian   known variance s2, theta = mu / s2,      G = s2 * theta^2 / 2
    bernoulli  theta = logit(p),                        G = log(1 + e^theta)
    poisson    theta = log(rate),                       G = e^theta
    gamma      known shape a, theta = -1/scale < 0,     G = -a * log(-theta)
    negbin     known size r, theta = log(1 - p) < 0,    G = -r * log(1 - e^theta)

The Gaussian is kept in its one-parameter form (sufficient statistic x,
variance fixed) because the completion model estimates a single canonical
parameter per matrix entry.  Gamma and negative-binomial nuisance parameters
are fixed constants, never estimated by the solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

GAUSSIAN = "gaussian"
BERNOULLI = "bernoulli"
POISSON = "poisson"
GAMMA = "gamma"
NEGBIN = "negbin"

KINDS = (GAUSSIAN, BERNOULLI, POISSON, GAMMA, NEGBIN)

#: Kinds whose canonical domain is the negative half-line (-inf, 0).
NEGATIVE_DOMAIN_KINDS = (GAMMA, NEGBIN)

#: Guard keeping gamma/negbin canonical parameters away from the log
#: singularity at zero: theta <= -DOMAIN_EPS.
DOMAIN_EPS = 1e-8


class DomainError(ValueError):
    """Canonical parameter outside the domain of the requested kind."""


class UnsupportedKindError(ValueError):
    """Distribution kind without the requested closed form."""


@dataclass(frozen=True)
class ExpFamModel:
    """A column block's distribution: kind plus fixed nuisance parameter.

    ``nuisance`` is the Gaussian variance, the Gamma shape, or the
    negative-binomial size, depending on ``kind``; Bernoulli and Poisson
    carry none.
    """

    kind: str
    nuisance: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedKindError(f"unknown kind {self.kind!r}")
        if self.kind == GAUSSIAN and self.nuisance is None:
            object.__setattr__(self, "nuisance", 1.0)
        if self.kind in (BERNOULLI, POISSON):
            if self.nuisance is not None:
                raise ValueError(f"{self.kind} carries no nuisance parameter")
        elif not (self.nuisance > 0):
            raise ValueError(f"{self.kind} nuisance must be > 0, got {self.nuisance}")

    @property
    def token(self) -> str:
        """Serialized form used in layout files and CLI flags."""
        if self.kind in (BERNOULLI, POISSON):
            return self.kind
        if self.kind == GAUSSIAN and self.nuisance == 1.0:
            return self.kind
        return f"{self.kind}:{self.nuisance:g}"

    @classmethod
    def from_token(cls, token: str) -> "ExpFamModel":
        """Parse ``kind`` or ``kind:nuisance`` (e.g. ``gamma:2.0``)."""
        name, sep, value = token.strip().partition(":")
        name = name.lower()
        if not sep:
            return cls(name)
        return cls(name, float(value))

    def domain(self, alpha: float = np.inf) -> tuple[float, float]:
        """Canonical-parameter interval, intersected with the box [-alpha, alpha]."""
        if self.kind in NEGATIVE_DOMAIN_KINDS:
            return (-alpha, min(-DOMAIN_EPS, alpha))
        return (-alpha, alpha)


def gaussian(variance: float = 1.0) -> ExpFamModel:
    return ExpFamModel(GAUSSIAN, variance)


def bernoulli() -> ExpFamModel:
    return ExpFamModel(BERNOULLI)


def poisson() -> ExpFamModel:
    return ExpFamModel(POISSON)


def gamma(shape: float) -> ExpFamModel:
    return ExpFamModel(GAMMA, shape)


def negbin(size: float) -> ExpFamModel:
    return ExpFamModel(NEGBIN, size)


def _check_domain(model: ExpFamModel, theta):
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise DomainError(f"non-finite canonical parameter for {model.kind}")
    if model.kind in NEGATIVE_DOMAIN_KINDS and np.any(theta > -DOMAIN_EPS):
        raise DomainError(
            f"{model.kind} requires theta <= -{DOMAIN_EPS:g}, "
            f"got max {theta.max():g}"
        )
    return theta


def log_partition(model: ExpFamModel, theta):
    """Log-partition function G(theta); convex, finite on the domain.

    Accepts scalars or arrays; raises :class:`DomainError` outside the
    canonical domain (non-finite input, or theta >= 0 for gamma/negbin).
    """
    th = _check_domain(model, theta)
    if model.kind == GAUSSIAN:
        out = 0.5 * model.nuisance * th**2
    elif model.kind == BERNOULLI:
        out = np.logaddexp(0.0, th)
    elif model.kind == POISSON:
        out = np.exp(th)
    elif model.kind == GAMMA:
        out = -model.nuisance * np.log(-th)
    else:  # NEGBIN: 1 - e^theta = -expm1(theta), exact near theta -> 0-
        out = -model.nuisance * np.log(-np.expm1(th))
    return out if np.ndim(theta) else float(out)


def mean_map(model: ExpFamModel, theta):
    """Mean parameter dG/dtheta; strictly increasing on the domain."""
    th = _check_domain(model, theta)
    if model.kind == GAUSSIAN:
        out = model.nuisance * th
    elif model.kind == BERNOULLI:
        out = expit(th)
    elif model.kind == POISSON:
        out = np.exp(th)
    elif model.kind == GAMMA:
        out = -model.nuisance / th
    else:  # NEGBIN: r e^th / (1 - e^th) = r / expm1(-th)
        out = model.nuisance / np.expm1(-th)
    return out if np.ndim(theta) else float(out)


def curvature(model: ExpFamModel, theta):
    """Second derivative d2G/dtheta2; strictly positive on the domain."""
    th = _check_domain(model, theta)
    if model.kind == GAUSSIAN:
        out = np.full_like(th, model.nuisance)
    elif model.kind == BERNOULLI:
        out = expit(th) * expit(-th)
    elif model.kind == POISSON:
        out = np.exp(th)
    elif model.kind == GAMMA:
        out = model.nuisance / th**2
    else:  # NEGBIN: r e^th / (1 - e^th)^2
        out = model.nuisance * np.exp(th) / np.expm1(th) ** 2
    return out if np.ndim(theta) else float(out)


def nll_term(model: ExpFamModel, y, theta):
    """Per-entry negative log-likelihood G(theta) - y * theta.

    Convex in theta and minimized where ``mean_map(theta) == y`` whenever
    that is attainable.  The base-measure term h(y) is dropped: it does not
    depend on theta.
    """
    th = _check_domain(model, theta)
    out = log_partition(model, th) - np.asarray(y, dtype=float) * th
    return out if (np.ndim(theta) or np.ndim(y)) else float(out)


def bregman(model: ExpFamModel, x, y):
    """Bregman divergence of G between canonical parameters x and y.

        d(x, y) = G(x) - G(y) - (x - y) G'(y)  >=  0,

    zero iff x == y.  Within one family this equals the Kullback-Leibler
    divergence KL(p_y || p_x).
    """
    xv = _check_domain(model, x)
    yv = _check_domain(model, y)
    out = log_partition(model, xv) - log_partition(model, yv) - (xv - yv) * mean_map(model, yv)
    return out if (np.ndim(x) or np.ndim(y)) else float(out)


def sample(model: ExpFamModel, theta, rng: np.random.Generator, size=None):
    """Draw from the model at canonical parameter theta.

    Deterministic given the generator state.  ``theta`` may be an array, in
    which case one draw per entry is returned (``size`` must then be None
    or match the shape).  The negative binomial is drawn as a Poisson-Gamma
    mixture, which realizes the continuous-size extension exactly.
    """
    th = _check_domain(model, theta)
    if model.kind == GAUSSIAN:
        return rng.normal(model.nuisance * th, np.sqrt(model.nuisance), size=size)
    if model.kind == BERNOULLI:
        shape = np.shape(th) if size is None else size
        return (rng.random(size=shape) < expit(th)).astype(float)
    if model.kind == POISSON:
        return rng.poisson(np.exp(th), size=size).astype(float)
    if model.kind == GAMMA:
        return rng.gamma(shape=model.nuisance, scale=-1.0 / th, size=size)
    # NEGBIN: lambda ~ Gamma(r, scale=(1-p)/p), X | lambda ~ Poisson(lambda)
    lam = rng.gamma(shape=model.nuisance, scale=1.0 / np.expm1(-th), size=size)
    return rng.poisson(lam).astype(float)


@dataclass(frozen=True)
class CurvatureBounds:
    """Uniform curvature bounds over a canonical-parameter interval.

    ``lower <= d2G/dtheta2 <= upper`` holds for every theta in the interval
    the bounds were built for; ``gamma`` is the sup-norm radius and ``k``
    the interval-widening constant (the interval is [-gamma - 1/k,
    gamma + 1/k], intersected with the canonical domain for gamma/negbin).
    """

    lower: float
    upper: float
    gamma: float
    k: float

    def __post_init__(self):
        if not (0 < self.lower <= self.upper):
            raise ValueError(f"need 0 < lower <= upper, got ({self.lower}, {self.upper})")


def theta_interval(
    model: ExpFamModel, gamma: float, k: float, negative_interval=None
) -> tuple[float, float]:
    """Canonical-parameter interval the curvature bounds apply to.

    Real-line kinds get [-gamma - 1/k, gamma + 1/k].  Negative-domain kinds
    (gamma, negbin) get ``negative_interval`` when supplied, else the default
    [-gamma - 1/k, -1/k], which stays 1/k away from the log singularity.
    """
    x = gamma + 1.0 / k
    if model.kind in NEGATIVE_DOMAIN_KINDS:
        if negative_interval is None:
            lo, hi = -x, -1.0 / k
        else:
            lo, hi = negative_interval
        if not (lo < hi < 0):
            raise ValueError(f"need lo < hi < 0 for {model.kind}, got ({lo}, {hi})")
        return (lo, hi)
    return (-x, x)


def _bounds_per_kind(model: ExpFamModel, gamma: float, k: float,
                     negative_interval, tight_upper: bool) -> CurvatureBounds:
    if not (gamma > 0 and k > 0):
        raise ValueError(f"need gamma > 0 and k > 0, got ({gamma}, {k})")
    x = gamma + 1.0 / k
    if model.kind == GAUSSIAN:
        lo_b = hi_b = model.nuisance
    elif model.kind == BERNOULLI:
        lo_b = np.exp(-x) / (1.0 + np.exp(x)) ** 2
        hi_b = 0.25
    elif model.kind == POISSON:
        lo_b = np.exp(-x)
        hi_b = np.exp(x) if tight_upper else np.exp(-x)
    elif model.kind in NEGATIVE_DOMAIN_KINDS:
        lo, hi = theta_interval(model, gamma, k, negative_interval)
        if lo < -x - 1e-12:
            raise ValueError(
                f"interval left end {lo} exceeds -(gamma + 1/k) = {-x}; "
                "the closed-form lower bound no longer applies"
            )
        if model.kind == GAMMA:
            lo_b = model.nuisance / x**2
            hi_b = model.nuisance / min(abs(lo), abs(hi)) ** 2
        else:  # NEGBIN: curvature is increasing on theta < 0
            r = model.nuisance
            lo_b = r * np.exp(-x) / (1.0 - np.exp(-x)) ** 2
            hi_b = r * np.exp(hi) / np.expm1(hi) ** 2 if tight_upper else lo_b
    else:  # pragma: no cover - KINDS is closed
        raise UnsupportedKindError(model.kind)
    return CurvatureBounds(float(lo_b), float(hi_b), gamma, k)


def curvature_bounds(
    model: ExpFamModel, gamma: float, k: float, negative_interval=None
) -> CurvatureBounds:
    """Curvature envelope per kind over :func:`theta_interval`.

    gaussian    lower = upper = s2
    bernoulli   lower = e^-x / (1 + e^x)^2          upper = 1/4
    poisson     lower = e^-x                        upper = e^x
    gamma       lower = a / x^2                     upper = a / min(|lo|, |hi|)^2
    negbin      lower = r e^-x / (1 - e^-x)^2       upper = r e^hi / (1 - e^hi)^2

    with x = gamma + 1/k and, for the negative-domain kinds, (lo, hi) the
    interval from :func:`theta_interval`.  Every bound is a valid inf/sup
    envelope of :func:`curvature` over that interval (the bernoulli and
    gamma lower bounds are conservative rather than tight), so the Taylor
    sandwich ``lower (x-y)^2 <= 2 d(x, y) <= upper (x-y)^2`` holds.
    """
    return _bounds_per_kind(model, gamma, k, negative_interval, tight_upper=True)


def table_curvature_bounds(
    model: ExpFamModel, gamma: float, k: float, negative_interval=None
) -> CurvatureBounds:
    """Curvature-table rows feeding the penalty-selection rule.

    Identical to :func:`curvature_bounds` except that the poisson upper
    entry is ``e^-x`` and the negbin upper entry equals its lower one
    (``r e^x / (1 - e^x)^2`` simplifies to the lower form).  The penalty
    rule is stated in terms of these rows; they do NOT upper-bound the
    curvature of those two kinds, so divergence sandwiches must use
    :func:`curvature_bounds` instead.
    """
    return _bounds_per_kind(model, gamma, k, negative_interval, tight_upper=False)
