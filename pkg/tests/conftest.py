import numpy as np
import pytest

from mixedmc import ExpFamModel, bernoulli, gamma, gaussian, negbin, poisson


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def all_models() -> list[ExpFamModel]:
    return [gaussian(1.0), gaussian(2.0), bernoulli(), poisson(), gamma(2.0), negbin(2.0)]


def random_theta(model: ExpFamModel, rng, n: int, lo: float = -3.0, hi: float = 3.0):
    """Uniform draws from [lo, hi] intersected with the canonical domain.

    Negative-domain kinds stay below -0.1 so that finite differences keep
    their accuracy away from the log singularity at zero.
    """
    domain_lo, domain_hi = model.domain()
    if domain_hi <= 0:
        domain_hi = -0.1
    a, b = max(lo, domain_lo), min(hi, domain_hi)
    return rng.uniform(a, b, size=n)
