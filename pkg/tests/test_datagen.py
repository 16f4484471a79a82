"""Synthetic instance generation, error metrics, and serialization."""

import numpy as np
import pytest

from mixedmc import (
    ColumnBlockLayout,
    SamplingScheme,
    bernoulli,
    datagen,
    gamma,
    gaussian,
    gen_low_rank_theta,
    gen_observed,
    make_instance,
    negbin,
    poisson,
    relative_error,
    weighted_frobenius,
)
from mixedmc.expfam import DOMAIN_EPS


def numerical_rank(a):
    sv = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(sv > 1e-9 * sv[0]))


@pytest.fixture
def mixed_layout():
    return ColumnBlockLayout(10, ((gaussian(), 3), (gamma(2.0), 4), (negbin(1.5), 3)))


class TestGenTheta:
    def test_rank_and_scale(self, rng):
        layout = ColumnBlockLayout(10, ((gaussian(), 10),))
        theta, shifted = gen_low_rank_theta(10, 10, 1, 1.0, layout, rng)
        assert numerical_rank(theta) == 1
        assert np.abs(theta).max() == pytest.approx(1.0, abs=1e-12)
        assert shifted == ()

    def test_shifted_blocks_raise_rank_by_at_most_one(self, rng, mixed_layout):
        theta, shifted = gen_low_rank_theta(10, 10, 1, 1.0, mixed_layout, rng)
        assert shifted == (1, 2)
        assert numerical_rank(theta) <= 2

    def test_negative_blocks_in_range(self, rng, mixed_layout):
        theta, _ = gen_low_rank_theta(10, 10, 2, 1.5, mixed_layout, rng)
        neg = theta[:, 3:]
        assert neg.max() <= -DOMAIN_EPS
        assert neg.min() >= -1.5 - 1e-12
        assert np.abs(theta).max() <= 1.5 + 1e-12

    def test_seed_reproducibility(self, mixed_layout):
        a, _ = gen_low_rank_theta(10, 10, 2, 1.0, mixed_layout, np.random.default_rng(4))
        b, _ = gen_low_rank_theta(10, 10, 2, 1.0, mixed_layout, np.random.default_rng(4))
        assert np.array_equal(a, b)

    def test_rank_validation(self, rng, mixed_layout):
        with pytest.raises(ValueError):
            gen_low_rank_theta(10, 10, 11, 1.0, mixed_layout, rng)


class TestGenObserved:
    def test_degenerate_bernoulli(self, rng):
        layout = ColumnBlockLayout(40, ((bernoulli(), 40),))
        theta = np.full((40, 40), -50.0)
        y = gen_observed(theta, layout, np.ones((40, 40), bool), rng)
        assert np.all(y == 0.0)

    def test_gaussian_block_mean(self):
        rng = np.random.default_rng(3)
        n = 320
        layout = ColumnBlockLayout(n, ((gaussian(1.0), n),))
        theta = np.full((n, n), 2.0)
        y = gen_observed(theta, layout, np.ones((n, n), bool), rng)
        assert y.mean() == pytest.approx(2.0, abs=0.01)

    def test_mask_all_false(self, rng, mixed_layout):
        theta, _ = gen_low_rank_theta(10, 10, 1, 1.0, mixed_layout, rng)
        y = gen_observed(theta, mixed_layout, np.zeros((10, 10), bool), rng)
        assert np.all(y == 0.0)

    def test_extreme_theta_matches_mean_limit(self, rng):
        layout = ColumnBlockLayout(50, ((poisson(), 50),))
        theta = np.full((50, 50), -30.0)  # mean e^-30, draws are all zero
        y = gen_observed(theta, layout, np.ones((50, 50), bool), rng)
        assert np.all(y == 0.0)


class TestErrors:
    def test_exact_recovery_is_zero(self, rng, mixed_layout):
        theta, _ = gen_low_rank_theta(10, 10, 2, 1.0, mixed_layout, rng)
        overall, per = relative_error(theta, theta, mixed_layout)
        assert overall == 0.0
        assert per == [0.0, 0.0, 0.0]

    def test_zero_estimate_is_one(self, rng, mixed_layout):
        theta, _ = gen_low_rank_theta(10, 10, 2, 1.0, mixed_layout, rng)
        overall, per = relative_error(np.zeros_like(theta), theta, mixed_layout)
        assert overall == pytest.approx(1.0)
        assert per == pytest.approx([1.0, 1.0, 1.0])

    def test_scaled_perturbation(self, rng):
        layout = ColumnBlockLayout(8, ((gaussian(), 8),))
        theta, _ = gen_low_rank_theta(8, 8, 2, 1.0, layout, rng)
        e = rng.standard_normal((8, 8))
        e *= 0.1 * np.linalg.norm(theta) / np.linalg.norm(e)
        overall, per = relative_error(theta + e, theta, layout)
        assert overall == pytest.approx(0.1, abs=1e-12)
        assert per[0] == pytest.approx(0.1, abs=1e-12)


class TestWeightedFrobenius:
    def test_uniform_scaling(self, rng):
        a = rng.standard_normal((6, 7))
        got = weighted_frobenius(a, SamplingScheme.uniform(0.25))
        assert got == pytest.approx(0.5 * np.linalg.norm(a))

    def test_zero_matrix(self):
        assert weighted_frobenius(np.zeros((3, 3)), SamplingScheme.uniform(0.7)) == 0.0

    def test_single_entry_indicator(self):
        pi = np.full((2, 2), 1e-12)
        pi[0, 1] = 1.0
        a = np.array([[5.0, -3.0], [2.0, 7.0]])
        got = weighted_frobenius(a, SamplingScheme.non_uniform(pi))
        assert got == pytest.approx(3.0, abs=1e-4)

    def test_floor_inequality(self, rng):
        # p ||A||_F^2 <= ||A||_{Pi,F}^2 for min probability p
        for _ in range(20):
            a = rng.standard_normal((5, 6))
            pi = rng.uniform(0.2, 1.0, size=(5, 6))
            scheme = SamplingScheme.non_uniform(pi)
            lhs = scheme.p_floor * np.linalg.norm(a) ** 2
            assert lhs <= weighted_frobenius(a, scheme) ** 2 + 1e-9


class TestInstanceRoundTrip:
    def test_save_load(self, tmp_path, mixed_layout):
        inst = make_instance(mixed_layout, rank=2, gamma=1.0,
                             scheme=SamplingScheme.uniform(0.6), seed=42)
        datagen.save_instance(inst, str(tmp_path / "inst"))
        back = datagen.load_instance(str(tmp_path / "inst"))
        assert np.allclose(back.theta_true, inst.theta_true)
        assert np.array_equal(back.mask, inst.mask)
        assert np.allclose(back.y_full[inst.mask], inst.y_full[inst.mask])
        assert back.layout == inst.layout
        assert back.seed == 42
        assert back.rank_target == 2
        assert back.shifted_blocks == inst.shifted_blocks

    def test_instance_invariants(self, mixed_layout):
        inst = make_instance(mixed_layout, rank=2, gamma=1.0,
                             scheme=SamplingScheme.uniform(0.6), seed=1)
        assert numerical_rank(inst.theta_true) <= 3
        assert np.abs(inst.theta_true).max() <= 1.0 + 1e-12
        assert np.all(inst.y_observed[~inst.mask] == 0.0)
