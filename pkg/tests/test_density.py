"""Leave-one-out density/score estimation and the pairwise engine."""

import numpy as np
import pytest

from wadbounds import _core
from wadbounds._core import _fallback
from wadbounds.density import (
    build_score_table,
    check_bandwidth_rates,
    loo_density,
    loo_score,
    pair_gradient_field,
)
from wadbounds.errors import BandwidthRateWarning, IndexOutOfRange
from wadbounds.kernels import build_kernel

from conftest import linear_sample, make_sample

PHI_M1 = 0.24197072451914337  # standard normal density at -1


def naive_loo_density(sample, K, h, i, z):
    total = 0.0
    for j in range(sample.n):
        if j != i:
            total += K.eval((np.asarray(z, dtype=float) - sample.z[j]) / h)
    return total / ((sample.n - 1) * h**sample.ell)


def naive_loo_score(sample, K, h, i, z):
    total = np.zeros(sample.ell)
    for j in range(sample.n):
        if j != i:
            total += K.eval_gradient((np.asarray(z, dtype=float) - sample.z[j]) / h)
    return -2.0 * total / ((sample.n - 1) * h ** (sample.ell + 1))


class TestLooDensity:
    def test_two_point_hand_value(self):
        # n=2, ell=1, gaussian, h=1, Z={0,1}: the single remaining term is phi(-1)
        s = make_sample([0.0, 0.0], [0.0, 0.0], [[0.0], [1.0]])
        K = build_kernel("gaussian", 1)
        assert loo_density(s, K, 1.0, 0, [0.0]) == pytest.approx(PHI_M1, abs=1e-15)

    def test_identical_points(self):
        s = make_sample(np.zeros(5), np.zeros(5), np.full((5, 2), 0.3))
        K = build_kernel("gaussian", 2)
        assert loo_density(s, K, 1.0, 2, [0.3, 0.3]) == pytest.approx(K.eval([0.0, 0.0]), abs=1e-15)

    @pytest.mark.parametrize("h", [0.5, 1.0, 2.0])
    def test_matches_naive_oracle(self, h, rng):
        s = linear_sample(15, seed=3)
        K = build_kernel("higher_order_gaussian", 2)
        for _ in range(20):
            z = rng.standard_normal(2)
            i = int(rng.integers(0, s.n))
            assert loo_density(s, K, h, i, z) == pytest.approx(
                naive_loo_density(s, K, h, i, z), abs=1e-14
            )

    def test_index_out_of_range(self):
        s = linear_sample(5)
        K = build_kernel("gaussian", 2)
        with pytest.raises(IndexOutOfRange):
            loo_density(s, K, 1.0, 5, [0.0, 0.0])
        with pytest.raises(IndexOutOfRange):
            loo_score(s, K, 1.0, -1, [0.0, 0.0])


class TestLooScore:
    def test_two_point_hand_value(self):
        # -2 * d/dz phi(z - 1) at z=0 is -2 * phi'(-1) = -2 * phi(-1)
        s = make_sample([0.0, 0.0], [0.0, 0.0], [[0.0], [1.0]])
        K = build_kernel("gaussian", 1)
        val = loo_score(s, K, 1.0, 0, [0.0])
        assert val == pytest.approx([-2.0 * PHI_M1], abs=1e-15)

    def test_symmetric_configuration_cancels(self):
        s = make_sample(np.zeros(3), np.zeros(3), [[-1.2], [0.0], [1.2]])
        K = build_kernel("gaussian", 1)
        assert loo_score(s, K, 1.0, 1, [0.0]) == pytest.approx([0.0], abs=1e-15)

    def test_matches_finite_difference_of_density(self, rng):
        s = linear_sample(12, seed=5)
        K = build_kernel("gaussian", 2)
        step = 1e-6
        for _ in range(10):
            z = rng.standard_normal(2)
            i = int(rng.integers(0, s.n))
            score = loo_score(s, K, 0.8, i, z)
            for j in range(2):
                zp, zm = z.copy(), z.copy()
                zp[j] += step
                zm[j] -= step
                fd = (loo_density(s, K, 0.8, i, zp) - loo_density(s, K, 0.8, i, zm)) / (2 * step)
                assert score[j] == pytest.approx(-2.0 * fd, rel=1e-6, abs=1e-10)


class TestScoreTable:
    def test_entries_equal_pointwise_calls(self):
        s = linear_sample(20, seed=1)
        K = build_kernel("gaussian", 2)
        t = build_score_table(s, K, 0.7)
        for i in range(s.n):
            assert t.fhat[i] == pytest.approx(loo_density(s, K, 0.7, i, s.z[i]), abs=1e-13)
            assert t.lhat[i] == pytest.approx(loo_score(s, K, 0.7, i, s.z[i]), abs=1e-13)

    def test_naive_double_loop_oracle(self):
        s = linear_sample(50, seed=7)
        K = build_kernel("higher_order_gaussian", 2)
        t = build_score_table(s, K, 0.6)
        fhat = np.array([naive_loo_density(s, K, 0.6, i, s.z[i]) for i in range(s.n)])
        lhat = np.array([naive_loo_score(s, K, 0.6, i, s.z[i]) for i in range(s.n)])
        assert np.max(np.abs(t.fhat - fhat)) < 1e-12
        assert np.max(np.abs(t.lhat - lhat)) < 1e-12

    def test_lhat_is_minus_two_grad(self):
        s = linear_sample(10)
        t = build_score_table(s, build_kernel("gaussian", 2), 1.0)
        assert np.array_equal(t.lhat, -2.0 * t.grad_fhat)

    def test_gaussian_density_nonnegative(self):
        s = linear_sample(30, seed=9)
        t = build_score_table(s, build_kernel("gaussian", 2), 0.5)
        assert np.all(t.fhat >= 0.0)

    def test_outcomes_never_enter(self):
        z = np.random.default_rng(2).standard_normal((15, 2))
        a = make_sample(np.zeros(15), np.ones(15), z)
        b = make_sample(np.full(15, -5.0), np.full(15, 7.0), z)
        K = build_kernel("gaussian", 2)
        ta = build_score_table(a, K, 0.8)
        tb = build_score_table(b, K, 0.8)
        assert np.array_equal(ta.fhat, tb.fhat)
        assert np.array_equal(ta.grad_fhat, tb.grad_fhat)

    def test_moving_one_point_moves_all_rows(self):
        rng = np.random.default_rng(4)
        z = rng.standard_normal((8, 2))
        z2 = z.copy()
        z2[3] += 0.5
        K = build_kernel("gaussian", 2)
        ta = build_score_table(make_sample(np.zeros(8), np.zeros(8), z), K, 1.0)
        tb = build_score_table(make_sample(np.zeros(8), np.zeros(8), z2), K, 1.0)
        assert not np.allclose(ta.fhat, tb.fhat)

    def test_two_rows_depend_only_on_each_other(self):
        s = make_sample([0.0, 0.0], [0.0, 0.0], [[0.0], [1.0]])
        K = build_kernel("gaussian", 1)
        t = build_score_table(s, K, 1.0)
        assert t.fhat[0] == pytest.approx(PHI_M1, abs=1e-15)
        assert t.fhat[1] == pytest.approx(PHI_M1, abs=1e-15)

    def test_nonpositive_bandwidth(self):
        with pytest.raises(ValueError):
            build_score_table(linear_sample(5), build_kernel("gaussian", 2), 0.0)

    def test_determinism(self):
        s = linear_sample(60, seed=11)
        K = build_kernel("gaussian", 2)
        t1 = build_score_table(s, K, 0.4)
        t2 = build_score_table(s, K, 0.4)
        assert np.array_equal(t1.fhat, t2.fhat)
        assert np.array_equal(t1.grad_fhat, t2.grad_fhat)


class TestBackendParity:
    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_score_table_backends_agree(self, ell):
        if _core.BACKEND != "compiled":
            pytest.skip("compiled backend not available")
        rng = np.random.default_rng(21)
        z = rng.standard_normal((40, ell))
        coeffs = build_kernel("higher_order_gaussian", ell).coefficients
        f1, g1 = _core.score_table(z, 0.6, np.ascontiguousarray(coeffs))
        f2, g2 = _fallback.score_table(z, 0.6, coeffs)
        assert np.max(np.abs(f1 - f2)) < 1e-13
        assert np.max(np.abs(g1 - g2)) < 1e-13

    def test_gradient_field_backends_agree(self):
        if _core.BACKEND != "compiled":
            pytest.skip("compiled backend not available")
        rng = np.random.default_rng(22)
        z = rng.standard_normal((25, 2))
        coeffs = build_kernel("gaussian", 2).coefficients
        g1 = _core.pair_gradient_field(z, 0.5, np.ascontiguousarray(coeffs))
        g2 = _fallback.pair_gradient_field(z, 0.5, coeffs)
        assert np.max(np.abs(g1 - g2)) < 1e-14


class TestPairGradientField:
    def test_antisymmetric_zero_diagonal(self):
        s = linear_sample(12, seed=13)
        K = build_kernel("gaussian", 2)
        G = pair_gradient_field(s, K, 0.7)
        assert np.allclose(G, -np.swapaxes(G, 0, 1))
        assert np.allclose(G[np.arange(12), np.arange(12)], 0.0)

    def test_entries_are_kernel_gradients(self):
        s = linear_sample(6, seed=14)
        K = build_kernel("higher_order_gaussian", 2)
        G = pair_gradient_field(s, K, 0.9)
        for i in range(6):
            for j in range(6):
                if i != j:
                    expected = K.eval_gradient((s.z[i] - s.z[j]) / 0.9)
                    assert G[i, j] == pytest.approx(expected, abs=1e-13)


class TestBandwidthRates:
    def test_no_flags_in_legal_region(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error")
            flags = check_bandwidth_rates(n=100_000, ell=2, order=3, h=0.15, htilde=0.6)
        assert flags == []

    def test_small_h_flagged(self):
        with pytest.warns(BandwidthRateWarning):
            flags = check_bandwidth_rates(n=100, ell=2, order=3, h=0.05, htilde=0.8)
        assert any("too small" in f for f in flags)

    def test_large_h_flagged(self):
        with pytest.warns(BandwidthRateWarning):
            flags = check_bandwidth_rates(n=100_000, ell=2, order=3, h=0.9, htilde=0.9)
        assert any("too large" in f for f in flags)
