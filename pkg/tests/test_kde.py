import math

import numpy as np
import pytest
from scipy.integrate import quad

from lookout.kde import (
    DENSITY_FLOOR,
    Bandwidth,
    kde_at_points,
    kernel_eval,
    loo_kde,
    make_kernel,
    surprisals,
    unit_ball_volume,
)
from lookout.rips import death_diameters, quantile_diameter


class TestKernels:
    def test_gaussian_peak_2d(self):
        k = make_kernel("gaussian", 2)
        assert kernel_eval(np.zeros(2), k) == pytest.approx(1.0 / (2 * math.pi))

    def test_epanechnikov_peak_1d(self):
        k = make_kernel("epanechnikov", 1)
        assert unit_ball_volume(1) == pytest.approx(2.0)
        assert kernel_eval(np.zeros(1), k) == pytest.approx(0.75)

    def test_epanechnikov_compact_support(self):
        k = make_kernel("epanechnikov", 2)
        assert kernel_eval(np.array([1.0, 0.0]), k) == 0.0
        assert kernel_eval(np.array([0.8, 0.8]), k) == 0.0

    def test_peak_dominates(self):
        rng = np.random.default_rng(1)
        for tag in ("gaussian", "epanechnikov"):
            for m in (1, 2, 4):
                k = make_kernel(tag, m)
                for _ in range(50):
                    assert kernel_eval(rng.normal(size=m), k) <= k.k0

    @pytest.mark.parametrize("tag", ["gaussian", "epanechnikov"])
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_integrates_to_one(self, tag, m):
        # Radial reduction: integral = area(S^{m-1}) * int r^{m-1} K(r) dr.
        k = make_kernel(tag, m)
        sphere = 2 * math.pi ** (m / 2) / math.gamma(m / 2)
        upper = 1.0 if tag == "epanechnikov" else 40.0

        def radial(r):
            e = np.zeros(m)
            e[0] = r
            return r ** (m - 1) * kernel_eval(e, k)

        total, _ = quad(radial, 0.0, upper, limit=200)
        assert sphere * total == pytest.approx(1.0, abs=1e-8)

    def test_rejects_unknown_tag(self):
        with pytest.raises(ValueError):
            make_kernel("tophat", 2)

    def test_rejects_wrong_dimension_argument(self):
        with pytest.raises(ValueError):
            kernel_eval(np.zeros(3), make_kernel("gaussian", 2))


class TestBandwidth:
    def test_det_sqrt_inv(self):
        assert Bandwidth(h=4.0, m=2).det_sqrt_inv == pytest.approx(0.25)
        assert Bandwidth(h=1.0, m=7).det_sqrt_inv == 1.0

    def test_rejects_nonpositive(self):
        for h in (0.0, -1.0, float("nan")):
            with pytest.raises(ValueError):
                Bandwidth(h=h, m=2)


class TestKdeAtPoints:
    def test_two_identical_points(self):
        pts = np.array([[0.5], [0.5]])
        k = make_kernel("gaussian", 1)
        f = kde_at_points(pts, Bandwidth(h=1.0, m=1), k)
        assert np.allclose(f, (2 * math.pi) ** -0.5)

    def test_two_points_hand_value(self):
        pts = np.array([[0.0], [2.0]])
        f = kde_at_points(pts, Bandwidth(h=1.0, m=1), make_kernel("gaussian", 1))
        want = 0.5 * (2 * math.pi) ** -0.5 * (1.0 + math.exp(-2.0))
        assert f[0] == pytest.approx(want, rel=1e-14)
        assert f[1] == pytest.approx(want, rel=1e-14)

    def test_envelope_bounds_random_clouds(self):
        rng = np.random.default_rng(1234)
        for _ in range(60):
            n = int(rng.integers(2, 51))
            m = int(rng.integers(1, 6))
            pts = rng.normal(size=(n, m)) * rng.uniform(0.01, 100.0)
            h = float(rng.uniform(0.01, 50.0))
            tag = "gaussian" if rng.uniform() < 0.5 else "epanechnikov"
            k = make_kernel(tag, m)
            f = kde_at_points(pts, Bandwidth(h=h, m=m), k)
            top = k.k0 * h ** (-m / 2)
            assert np.all(f >= top / n * (1 - 1e-12))
            assert np.all(f <= top * (1 + 1e-12))

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(10)
        pts = rng.normal(size=(40, 3))
        k = make_kernel("gaussian", 3)
        bw = Bandwidth(h=0.7, m=3)
        perm = rng.permutation(40)
        assert np.allclose(kde_at_points(pts, bw, k)[perm],
                           kde_at_points(pts[perm], bw, k), rtol=1e-12)

    def test_blocked_equals_direct(self):
        # More rows than the internal block size: the block seams must
        # not change anything.
        rng = np.random.default_rng(77)
        pts = rng.normal(size=(2048 + 300, 2))
        k = make_kernel("gaussian", 2)
        bw = Bandwidth(h=0.5, m=2)
        f = kde_at_points(pts, bw, k)
        j = 2048 + 17
        diff = pts[j] - pts
        direct = bw.det_sqrt_inv / len(pts) * np.sum(
            k.k0 * np.exp(-0.5 * np.sum(diff * diff, axis=1) / bw.h))
        assert f[j] == pytest.approx(direct, rel=1e-12)

    def test_rejects_dimension_mismatch(self):
        pts = np.zeros((5, 2))
        with pytest.raises(ValueError):
            kde_at_points(pts, Bandwidth(h=1.0, m=3), make_kernel("gaussian", 3))


class TestLooKde:
    def test_identical_pair(self):
        pts = np.array([[0.0], [0.0]])
        k = make_kernel("gaussian", 1)
        bw = Bandwidth(h=1.0, m=1)
        f = kde_at_points(pts, bw, k)
        assert np.allclose(loo_kde(f, 2, bw, k), k.k0)

    def test_two_points_hand_value(self):
        pts = np.array([[0.0], [2.0]])
        k = make_kernel("gaussian", 1)
        bw = Bandwidth(h=1.0, m=1)
        f = kde_at_points(pts, bw, k)
        want = (2 * math.pi) ** -0.5 * math.exp(-2.0)
        assert loo_kde(f, 2, bw, k)[0] == pytest.approx(want, rel=1e-12)

    def test_matches_direct_loo(self):
        rng = np.random.default_rng(2024)
        for _ in range(40):
            n = int(rng.integers(3, 30))
            m = int(rng.integers(1, 4))
            pts = rng.normal(size=(n, m)) * rng.uniform(0.1, 10.0)
            h = float(rng.uniform(0.05, 5.0))
            tag = "gaussian" if rng.uniform() < 0.5 else "epanechnikov"
            k = make_kernel(tag, m)
            bw = Bandwidth(h=h, m=m)
            got = loo_kde(kde_at_points(pts, bw, k), n, bw, k)
            top = k.k0 * bw.det_sqrt_inv
            for i in range(n):
                rest = np.delete(pts, i, axis=0)
                sq = np.sum((pts[i] - rest) ** 2, axis=1) / h
                if k.tag == "gaussian":
                    vals = k.k0 * np.exp(-0.5 * sq)
                else:
                    vals = k.k0 * np.maximum(0.0, 1.0 - sq)
                direct = bw.det_sqrt_inv / (n - 1) * vals.sum()
                assert abs(got[i] - direct) <= 1e-10 * direct + 1e-12 * top

    def test_isolated_point_clamps(self):
        # Far point under a compact kernel: the closed form hits the floor
        # and the surprisal lands at -log of the floor.
        pts = np.vstack([np.zeros((9, 2)), [[1e6, 1e6]]])
        k = make_kernel("epanechnikov", 2)
        bw = Bandwidth(h=1.0, m=2)
        f_loo = loo_kde(kde_at_points(pts, bw, k), 10, bw, k)
        assert f_loo[-1] == DENSITY_FLOOR
        assert surprisals(f_loo)[-1] == pytest.approx(690.77552789821, rel=1e-10)

    def test_never_exceeds_full_density(self):
        # Dropping the self-term can only lower the estimate.
        rng = np.random.default_rng(3)
        pts = rng.normal(size=(25, 2))
        k = make_kernel("gaussian", 2)
        bw = Bandwidth(h=0.3, m=2)
        f = kde_at_points(pts, bw, k)
        assert np.all(loo_kde(f, 25, bw, k) <= f + 1e-15)

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            loo_kde(np.array([1.0]), 1, Bandwidth(h=1.0, m=1),
                    make_kernel("gaussian", 1))


class TestSurprisals:
    def test_basic_values(self):
        assert surprisals(np.array([1.0]))[0] == 0.0
        assert surprisals(np.array([math.exp(-3.0)]))[0] == pytest.approx(3.0)

    def test_envelope_bound_algebra(self):
        n, m, h = 50, 2, 0.7
        k = make_kernel("gaussian", m)
        lower = k.k0 * h ** (-m / 2) / n
        want = math.log(n) - math.log(k.k0) + (m / 2) * math.log(h)
        assert surprisals(np.array([lower]))[0] == pytest.approx(want, rel=1e-12)

    def test_floors_nonpositive(self):
        s = surprisals(np.array([0.0, -1e-5]))
        assert np.all(s == -math.log(DENSITY_FLOOR))


class TestConsistencySmoke:
    def test_mse_decreases_with_n(self):
        # Standard normal in one dimension, bandwidth from the 0.98 death
        # quantile; grid MSE against the true density must fall with n in
        # median over seeds.
        grid = np.linspace(-3.0, 3.0, 61)
        truth = np.exp(-0.5 * grid**2) / math.sqrt(2 * math.pi)
        k = make_kernel("gaussian", 1)
        mse = {n: [] for n in (100, 1000, 10000)}
        for seed in range(5):
            rng = np.random.default_rng(1000 + seed)
            for n in mse:
                x = rng.standard_normal(n)
                h = quantile_diameter(death_diameters(x.reshape(-1, 1)), 0.98)
                sq = (grid[:, None] - x[None, :]) ** 2 / h
                f_hat = h**-0.5 / n * (k.k0 * np.exp(-0.5 * sq)).sum(axis=1)
                mse[n].append(float(np.mean((f_hat - truth) ** 2)))
        med = {n: np.median(v) for n, v in mse.items()}
        assert med[100] > med[1000] > med[10000]
