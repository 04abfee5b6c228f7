import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad as scipy_quad

from growthfx.euclid import (
    Dimension,
    ExponentPair,
    RadialTransform,
    SphericalMeanProfile,
    diff_norm,
    fourier_radial,
    growth_lhs,
    lp_norm_radial,
    modulus_omega,
    plancherel_spectral,
    spherical_mean_radial,
    tail_lhs,
)
from growthfx.profiles import BallIndicator, Bump, Constant, Gaussian
from growthfx.specfun import bessel_j_norm

D2, D3, D4 = Dimension(2), Dimension(3), Dimension(4)
G = Gaussian(1.0)


def gauss_hat(n, rho):
    # transform of e^{-r^2/2}
    return (2 * math.pi) ** (n / 2) * np.exp(-0.5 * np.asarray(rho) ** 2)


class FunctionProfile(Gaussian):
    """Gaussian-decaying wrapper around an arbitrary radial function."""

    def __init__(self, fn):
        super().__init__(1.0)
        self.fn = fn

    def _eval(self, r):
        return self.fn(r)


class TestTypes:
    def test_dimension(self):
        assert D3.alpha_eq == 0.5
        assert D3.omega == pytest.approx(4 * math.pi)
        assert D2.omega == pytest.approx(2 * math.pi)
        with pytest.raises(ValueError):
            Dimension(1)

    def test_exponents(self):
        assert ExponentPair(1.0).q == math.inf
        assert ExponentPair(2.0).q == 2.0
        assert 1 / ExponentPair(1.5).p + 1 / ExponentPair(1.5).q == pytest.approx(1.0)
        with pytest.raises(ValueError):
            ExponentPair(2.5)


class TestTransform:
    def test_gaussian_at_origin(self):
        assert fourier_radial(G, D3, 0.0) == pytest.approx((2 * math.pi) ** 1.5, rel=1e-12)
        assert fourier_radial(G, D3, 0.0) == pytest.approx(15.74961, abs=1e-5)

    def test_ball_volume(self):
        assert fourier_radial(BallIndicator(1.0), D3, 0.0) == pytest.approx(4 * math.pi / 3, rel=1e-12)

    def test_gaussian_self_dual(self):
        assert abs(fourier_radial(G, D2, 1.0) - 2 * math.pi * math.exp(-0.5)) < 1e-8
        assert fourier_radial(G, D2, 1.0) == pytest.approx(3.8109445294603, abs=1e-12)

    @pytest.mark.parametrize("dim", [D2, D3, D4])
    def test_gaussian_closed_form(self, dim):
        rho = np.geomspace(1e-3, 12, 80)
        assert np.max(np.abs(fourier_radial(G, dim, rho) - gauss_hat(dim.n, rho))) < 1e-10

    def test_ball_closed_form_n3(self):
        # 4 pi (sin x - x cos x) / x^3
        x = np.geomspace(1e-2, 200, 60)
        ref = 4 * np.pi * (np.sin(x) - x * np.cos(x)) / x ** 3
        assert np.max(np.abs(fourier_radial(BallIndicator(1.0), D3, x) - ref)) < 1e-10

    def test_cache_transparent(self):
        xi = np.array([0.5, 2.0, 7.0])
        t1 = RadialTransform(Bump(1.0), D3)
        a = t1(xi[::-1])[::-1]
        b = RadialTransform(Bump(1.0), D3)(xi)
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_plancherel(self, n):
        dim = Dimension(n)
        for f in (G, Bump(1.0)):
            lhs = plancherel_spectral(f, dim)
            rhs = lp_norm_radial(f, dim, 2.0) ** 2
            assert abs(lhs - rhs) / rhs < 1e-6


class TestSphericalMean:
    def test_zero_radius(self):
        s = np.array([0.0, 0.7, 2.0])
        assert np.array_equal(spherical_mean_radial(Bump(1.0), D3, 0.0, s), Bump(1.0)(s))

    @given(st.integers(2, 5), st.floats(0, 5), st.floats(0, 5))
    def test_constant(self, n, t, s):
        assert spherical_mean_radial(Constant(1.0), Dimension(n), t, s) == pytest.approx(1.0, abs=1e-13)

    def test_product_formula_example(self):
        f = FunctionProfile(lambda r: bessel_j_norm(0.5, 2.0 * r))
        val = spherical_mean_radial(f, D3, 0.7, 1.3)
        assert abs(val - bessel_j_norm(0.5, 1.4) * bessel_j_norm(0.5, 2.6)) < 1e-8

    @given(st.sampled_from([2, 3, 4]), st.floats(0.1, 4), st.floats(0, 3), st.floats(0, 3))
    def test_product_formula(self, n, lam, t, s):
        dim = Dimension(n)
        f = FunctionProfile(lambda r: bessel_j_norm(dim.alpha_eq, lam * r))
        val = spherical_mean_radial(f, dim, t, s)
        assert abs(val - bessel_j_norm(dim.alpha_eq, lam * t) * bessel_j_norm(dim.alpha_eq, lam * s)) < 1e-8

    @pytest.mark.parametrize("t", [0.3, 1.0, 3.0])
    def test_transform_identity(self, t):
        xi = np.geomspace(1e-2, 1e2, 40)
        fh = RadialTransform(G, D3)(xi)
        mh = RadialTransform(SphericalMeanProfile(G, D3, t), D3, rtol=1e-10)(xi)
        assert np.max(np.abs(mh - bessel_j_norm(0.5, t * xi) * fh)) < 1e-6

    def test_transform_identity_bump_n2(self):
        xi = np.geomspace(1e-2, 30, 25)
        f = Bump(1.0)
        fh = RadialTransform(f, D2)(xi)
        mh = RadialTransform(SphericalMeanProfile(f, D2, 0.6), D2, rtol=1e-10)(xi)
        assert np.max(np.abs(mh - bessel_j_norm(0.0, 0.6 * xi) * fh)) < 1e-6


class TestNorms:
    def test_lp_examples(self):
        assert lp_norm_radial(BallIndicator(1.0), D3, 1.0) == pytest.approx(4 * math.pi / 3, rel=1e-12)
        assert abs(lp_norm_radial(G, D3, 2.0) - math.pi ** 0.75) < 1e-8
        assert lp_norm_radial(Constant(0.0), D3, 1.5) == 0.0

    def test_diff_norm_zero_t(self):
        assert diff_norm(G, D3, 2.0, 0.0) == 0.0

    def test_diff_norm_matches_plancherel(self):
        t = 0.5

        def g(rho):
            return (1 - bessel_j_norm(0.5, t * rho)) ** 2 * math.exp(-rho * rho) * rho * rho

        spectral = math.sqrt(D3.omega * scipy_quad(g, 0, 40, epsabs=1e-15, epsrel=1e-13, limit=200)[0])
        assert abs(diff_norm(G, D3, 2.0, t) - spectral) / spectral < 1e-6

    def test_diff_norm_saturates(self):
        assert diff_norm(G, D3, 2.0, 2.0) >= diff_norm(G, D3, 2.0, 0.01)

    def test_diff_norm_bounded_by_twice_norm(self):
        for p in (1.0, 1.5, 2.0):
            assert diff_norm(Bump(1.0), D3, p, 5.0) <= 2 * lp_norm_radial(Bump(1.0), D3, p) * (1 + 1e-10)

    def test_modulus(self):
        assert modulus_omega(G, D2, 1.0, 0.0) == 0.0
        r = np.array([0.1, 0.5, 1.0, 2.0])
        om = modulus_omega(G, D2, 1.0, r, points=6)
        assert np.all(np.diff(om) >= 0)
        for ri, oi in zip(r, om):
            assert oi >= diff_norm(G, D2, 1.0, float(ri)) * (1 - 1e-12)


class TestGrowth:
    def test_zero_t(self):
        assert growth_lhs(G, D3, ExponentPair(2.0), 0.0) == 0.0
        assert growth_lhs(G, D3, ExponentPair(1.0), 0.0) == 0.0

    def test_riemann_sum_oracle(self):
        rho = np.linspace(0, 14, 400_001)
        y = np.minimum(1.0, rho ** 4) * gauss_hat(3, rho) ** 2 * rho ** 2
        ref = math.sqrt(D3.omega * np.trapezoid(y, rho))
        assert abs(growth_lhs(G, D3, ExponentPair(2.0), 1.0) - ref) / ref < 1e-6

    def test_monotone_in_t(self):
        for p in (1.0, 1.5, 2.0):
            e = ExponentPair(p)
            assert growth_lhs(Bump(1.0), D3, e, 2.0) >= growth_lhs(Bump(1.0), D3, e, 1.0)

    def test_tail_large_t_is_full_norm(self):
        full = math.sqrt(D3.omega * scipy_quad(lambda r: gauss_hat(3, r) ** 2 * r * r, 0, 40, epsrel=1e-13)[0])
        assert tail_lhs(G, D3, ExponentPair(2.0), 1e4) == pytest.approx(full, rel=1e-6)

    def test_ball_p1_tail_finite(self):
        v = tail_lhs(BallIndicator(1.0), D2, ExponentPair(1.0), 1.0)
        assert math.isfinite(v) and v > 0

    def test_ball_rejected_when_not_integrable(self):
        # |fhat|^q ~ rho^(-3q/2) against rho^(n-1): q = 4/3 in n = 2 is not integrable
        with pytest.raises(ValueError):
            growth_lhs(BallIndicator(1.0), D2, ExponentPair(4.0), 1.0)

    @given(st.floats(1e-2, 50), st.sampled_from([1.0, 1.5, 2.0]), st.sampled_from([2, 3]))
    @settings(max_examples=10)
    def test_tail_below_growth(self, t, p, n):
        dim, e = Dimension(n), ExponentPair(p)
        for f in (G, Bump(1.0)):
            assert tail_lhs(f, dim, e, t) <= growth_lhs(f, dim, e, t) * (1 + 1e-12)
