"""Norms, projections, and the l-infinity prox against independent oracles."""

import numpy as np
import pytest
from scipy import optimize

from mixedmc import (
    EigMode,
    linf_ball_project,
    linf_prox,
    max_norm_upper,
    nuclear_norm,
    psd_project,
    tangent_project,
    tangent_project_perp,
    two_to_inf_norm,
)


def linf_prox_oracle(c, beta):
    """Smooth epigraph reformulation solved by SLSQP: min beta*t + 0.5||c-z||^2."""
    c = np.asarray(c, float)
    d = c.size

    def fun(v):
        z, t = v[:d], v[d]
        return beta * t + 0.5 * np.sum((c - z) ** 2)

    cons = [
        {"type": "ineq", "fun": lambda v, i=i: v[d] - v[i]} for i in range(d)
    ] + [
        {"type": "ineq", "fun": lambda v, i=i: v[d] + v[i]} for i in range(d)
    ]
    x0 = np.concatenate([c * 0.5, [np.abs(c).max() * 0.5 + 1e-3]])
    res = optimize.minimize(fun, x0, method="SLSQP", constraints=cons,
                            options={"maxiter": 300, "ftol": 1e-12})
    return res.x[:d]


def linf_objective(c, beta, z):
    return beta * np.max(np.abs(z)) + 0.5 * np.sum((np.asarray(c) - z) ** 2)


class TestNuclearNorm:
    def test_pinned(self):
        assert nuclear_norm(np.diag([3.0, 4.0])) == pytest.approx(7.0)
        assert nuclear_norm(np.eye(3)) == pytest.approx(3.0)

    def test_rank_one(self, rng):
        u = rng.standard_normal(6)
        v = rng.standard_normal(9)
        u *= 2.0 / np.linalg.norm(u)
        v *= 5.0 / np.linalg.norm(v)
        a = np.outer(u, v)
        assert nuclear_norm(a) == pytest.approx(10.0)
        # dense SVD oracle
        assert nuclear_norm(a) == pytest.approx(np.linalg.svd(a, compute_uv=False).sum())

    def test_sqrt_rank_frobenius_bound(self, rng):
        for _ in range(50):
            r = rng.integers(1, 5)
            a = rng.standard_normal((8, r)) @ rng.standard_normal((r, 6))
            assert nuclear_norm(a) <= np.sqrt(r) * np.linalg.norm(a) + 1e-8


class TestTwoToInf:
    def test_pinned(self):
        assert two_to_inf_norm(np.array([[3.0, 4.0], [0.0, 1.0]])) == pytest.approx(5.0)
        assert two_to_inf_norm(np.zeros((3, 3))) == 0.0

    def test_sup_characterization(self, rng):
        # ||A||_{2->inf} = sup_{||x||=1} ||Ax||_inf; random unit vectors give a
        # lower bound and the normalized rows attain it
        a = rng.standard_normal((5, 7))
        val = two_to_inf_norm(a)
        xs = rng.standard_normal((10**4, 7))
        xs /= np.linalg.norm(xs, axis=1, keepdims=True)
        mc = np.abs(xs @ a.T).max()
        assert mc <= val + 1e-12
        rows = a / np.linalg.norm(a, axis=1, keepdims=True)
        attained = max(np.abs(a @ r).max() for r in rows)
        assert attained == pytest.approx(val, abs=1e-12)

    def test_norm_chain(self, rng):
        for _ in range(25):
            a = rng.standard_normal((6, 5))
            fro = np.linalg.norm(a)
            opn = np.linalg.norm(a, 2)
            assert max_norm_upper(a) == pytest.approx(two_to_inf_norm(a))
            assert max_norm_upper(a) <= fro + 1e-12
            assert opn <= nuclear_norm(a) + 1e-12


class TestPsdProject:
    def test_pinned(self):
        out = psd_project(np.diag([1.0, -2.0]))
        assert np.allclose(out, np.diag([1.0, 0.0]))

    def test_idempotent_on_psd(self, rng):
        b = rng.standard_normal((6, 6))
        s = b @ b.T
        assert np.linalg.norm(psd_project(s) - s) <= 1e-10 * np.linalg.norm(s)

    def test_output_psd(self, rng):
        s = rng.standard_normal((8, 8))
        s = 0.5 * (s + s.T)
        out = psd_project(s)
        assert np.linalg.eigvalsh(out).min() >= -1e-10

    def test_nearest_point_oracle(self, rng):
        s = rng.standard_normal((8, 8))
        s = 0.5 * (s + s.T)
        out = psd_project(s)
        dist = np.linalg.norm(out - s)
        for _ in range(1000):
            b = rng.standard_normal((8, 8))
            cand = b @ b.T * rng.uniform(0.0, 2.0)
            assert dist <= np.linalg.norm(cand - s) + 1e-12

    def test_truncated_matches_full_when_k_covers_spectrum(self, rng):
        b = rng.standard_normal((10, 3))
        s = b @ b.T - 0.1 * np.eye(10)  # 3 dominant positive directions
        full = psd_project(s, EigMode.full())
        trunc = psd_project(s, EigMode.truncated(6))
        assert np.linalg.norm(full - trunc) <= 1e-8 * (1 + np.linalg.norm(full))

    def test_truncated_k_equal_dim_matches_full(self, rng):
        s = rng.standard_normal((7, 7))
        s = 0.5 * (s + s.T)
        full = psd_project(s, EigMode.full())
        trunc = psd_project(s, EigMode.truncated(7))
        assert np.linalg.norm(full - trunc) <= 1e-8

    def test_default_truncation_level(self):
        assert EigMode.default_truncated(100).k == 10
        assert EigMode.default_truncated(5).k == 1

    def test_mode_tokens(self):
        assert EigMode.from_token("full").is_full
        assert EigMode.from_token("trunc:12").k == 12
        assert EigMode.truncated(3).token == "trunc:3"
        with pytest.raises(ValueError):
            EigMode.from_token("lanczos")
        with pytest.raises(ValueError):
            EigMode.truncated(0)


class TestLinfProx:
    def test_pinned(self):
        assert np.allclose(linf_prox([3.0, 1.0], 1.0), [2.0, 1.0])
        assert np.allclose(linf_prox([1.0, 1.0, 1.0], 10.0), 0.0)
        assert np.allclose(linf_prox([-3.0, 1.0], 1.0), [-2.0, 1.0])
        c = np.array([0.3, -1.2, 0.0])
        assert np.allclose(linf_prox(c, 0.0), c)

    def test_matches_epigraph_oracle(self, rng):
        for _ in range(60):
            d = rng.integers(1, 9)
            c = rng.standard_normal(d) * rng.uniform(0.5, 4.0)
            beta = rng.uniform(0.0, 3.0)
            ours = linf_prox(c, beta)
            oracle = linf_prox_oracle(c, beta)
            assert linf_objective(c, beta, ours) <= linf_objective(c, beta, oracle) + 1e-6

    def test_local_optimality(self, rng):
        c = rng.standard_normal(6) * 2.0
        beta = 1.3
        ours = linf_prox(c, beta)
        base = linf_objective(c, beta, ours)
        for _ in range(1000):
            delta = rng.standard_normal(6)
            delta *= rng.uniform(0, 1e-3) / np.linalg.norm(delta)
            assert base <= linf_objective(c, beta, ours + delta) + 1e-12

    def test_zero_when_l1_small(self, rng):
        for _ in range(20):
            c = rng.standard_normal(5)
            beta = np.abs(c).sum() * rng.uniform(1.0, 3.0)
            assert np.allclose(linf_prox(c, beta), 0.0)


class TestBoxProject:
    def test_pinned(self):
        assert np.allclose(linf_ball_project(np.array([5.0, -0.5]), 1.0), [1.0, -0.5])

    def test_identity_inside(self, rng):
        x = rng.uniform(-1, 1, size=(4, 5))
        assert np.array_equal(linf_ball_project(x, 1.0), x)

    def test_is_entrywise_median(self, rng):
        x = rng.standard_normal(50) * 3
        alpha = 1.2
        expected = np.median(np.stack([np.full_like(x, -alpha), x, np.full_like(x, alpha)]), axis=0)
        assert np.allclose(linf_ball_project(x, alpha), expected)


class TestTangentSpace:
    def test_rank_one_pattern(self, rng):
        a = np.zeros((4, 5))
        a[0, 0] = 1.0
        b = rng.standard_normal((4, 5))
        pt = tangent_project(a, b)
        expected = b.copy()
        expected[1:, 1:] = 0.0
        assert np.allclose(pt, expected)

    def test_self_perp_zero(self, rng):
        b = rng.standard_normal((6, 5))
        assert np.linalg.norm(tangent_project_perp(b, b)) <= 1e-10

    def test_decomposition_identity(self, rng):
        a = rng.standard_normal((6, 2)) @ rng.standard_normal((2, 5))
        b = rng.standard_normal((6, 5))
        recon = tangent_project(a, b) + tangent_project_perp(a, b)
        assert np.linalg.norm(recon - b) <= 1e-10

    def test_rank_bound(self, rng):
        a = rng.standard_normal((6, 2)) @ rng.standard_normal((2, 5))
        b = rng.standard_normal((6, 5))
        sv = np.linalg.svd(tangent_project(a, b), compute_uv=False)
        assert np.sum(sv > 1e-8 * sv[0]) <= 4

    def test_nuclear_decomposability(self, rng):
        # ||A + P_perp(B - A)||_* = ||A||_* + ||P_perp(B - A)||_*
        for _ in range(25):
            a = rng.standard_normal((7, 2)) @ rng.standard_normal((2, 6))
            b = rng.standard_normal((7, 6))
            perp = tangent_project_perp(a, b - a)
            lhs = nuclear_norm(a + perp)
            rhs = nuclear_norm(a) + nuclear_norm(perp)
            assert abs(lhs - rhs) <= 1e-8

    def test_oracle_inequality_shape(self, rng):
        # ||B||_* >= ||A||_* + ||P_perp(B-A)||_* - ||P_T(B-A)||_*
        for _ in range(25):
            a = rng.standard_normal((7, 2)) @ rng.standard_normal((2, 6))
            b = rng.standard_normal((7, 6))
            lhs = nuclear_norm(b)
            rhs = (nuclear_norm(a)
                   + nuclear_norm(tangent_project_perp(a, b - a))
                   - nuclear_norm(tangent_project(a, b - a)))
            assert lhs >= rhs - 1e-8
