import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from growthfx.hyp import (
    JacobiTransform,
    MeanProfile,
    corollary7_tail,
    diff_norm_hyp,
    diff_norm_hyp_spectral,
    hyp_radius,
    inverse_jacobi_transform,
    jacobi_transform,
    lp_norm_hyp,
    plancherel_hyp,
    roundtrip_error,
    spherical_mean_hyp,
    spherical_mean_spectral,
    strip_halfwidth,
    theorem5_lhs,
    theorem6_lhs,
)
from growthfx.profiles import Bump, Constant, Gaussian
from growthfx.quad import DecayHint, GridSpec
from growthfx.specfun import OrderPair, SpectralPoint, c_function_density, jacobi_phi

from conftest import H3, ORDERS

GAUSS = Gaussian(1.0 / math.sqrt(2.0))  # e^{-t^2}


def gauss_hat_h3(lam):
    # transform of e^{-t^2} on H^3, by completing the square
    lam = np.asarray(lam, dtype=complex)
    return 2 * math.sqrt(math.pi) * np.exp((1 - lam ** 2) / 4) * np.sin(lam / 2) / lam


@pytest.fixture(scope="module")
def gauss_hat():
    return JacobiTransform(GAUSS, H3)


class SlowTail(Gaussian):
    """Infinite support with exponential decay too slow for Delta e^(rho t)."""

    def __init__(self):
        super().__init__(1.0)
        self.decay_hint = DecayHint("exponential", 1.0)

    def _eval(self, r):
        return np.exp(-r)


class TestTransform:
    def test_closed_form(self, gauss_hat):
        lam = np.array([0.05, 0.5, 1.0, 3.0, 10.0, 40.0])
        assert np.max(np.abs(gauss_hat(lam) - gauss_hat_h3(lam).real)) < 1e-12
        z = np.array([2 + 0.5j, 7 - 0.9j])
        assert np.max(np.abs(gauss_hat(z) - gauss_hat_h3(z))) < 1e-12

    def test_riemann_sum_oracle(self):
        t = np.linspace(0, 12, 600_001)
        ref = np.trapezoid(np.exp(-t * t) * np.sin(t) / np.where(t > 0, np.sinh(t), 1) * 4 * np.sinh(t) ** 2, t)
        assert abs(jacobi_transform(GAUSS, H3, 1.0) - ref) < 1e-8

    def test_zero_profile(self):
        assert jacobi_transform(Constant(0.0), H3, 1.5) == 0.0

    @pytest.mark.parametrize("order", ORDERS)
    def test_trivial_point(self, order):
        f = Bump(1.0)
        assert jacobi_transform(f, order, 1j * order.rho) == pytest.approx(lp_norm_hyp(f, order, 1.0), rel=1e-11)

    @pytest.mark.parametrize("order", ORDERS)
    def test_two_routes_agree(self, order):
        lam = np.array([0.0, 0.7, 4.0, 25.0, 3 + 0.8j * order.rho])
        for f in (GAUSS, Bump(1.0)):
            abel = jacobi_transform(f, order, lam, method="abel")
            direct = jacobi_transform(f, order, lam, method="direct")
            scale = lp_norm_hyp(f, order, 1.0)
            assert np.max(np.abs(abel - direct)) < 1e-11 * scale

    def test_real_points_give_real_values(self, gauss_hat):
        assert np.isrealobj(gauss_hat(np.array([1.0, 2.0])))
        assert jacobi_transform(GAUSS, H3, SpectralPoint(1.0)) == pytest.approx(gauss_hat(1.0))

    def test_history_independent(self):
        lam = np.array([3.0, 300.0, 17.5])
        a = JacobiTransform(Bump(1.0), H3)
        a(np.geomspace(1, 500, 50))
        b = JacobiTransform(Bump(1.0), H3)
        assert np.array_equal(a(lam), b(lam))

    def test_strip_rejected(self, gauss_hat):
        with pytest.raises(ValueError):
            gauss_hat(1 + 1.5j)

    def test_slow_decay_rejected(self):
        with pytest.raises(ValueError):
            hyp_radius(SlowTail(), H3)

    def test_mismatched_transform_rejected(self, gauss_hat):
        with pytest.raises(ValueError):
            theorem6_lhs(Bump(1.0), H3, 1.0, fhat=gauss_hat)


class TestInversion:
    def test_zero(self):
        assert np.all(inverse_jacobi_transform(lambda mu: 0 * mu, H3, np.array([0.0, 1.0, 3.0])) == 0)

    def test_roundtrip_h3_gaussian(self, gauss_hat):
        assert roundtrip_error(GAUSS, H3, fhat=gauss_hat) < 1e-4

    def test_pointwise_inverse(self, gauss_hat):
        t = np.array([0.0, 0.4, 1.3, 2.5])
        back = inverse_jacobi_transform(gauss_hat, H3, t, tol=1e-10)
        assert np.max(np.abs(back - np.exp(-t * t))) < 1e-8

    @pytest.mark.parametrize("order", ORDERS)
    def test_plancherel(self, order):
        for f in (GAUSS, Bump(1.0)):
            lhs = lp_norm_hyp(f, order, 2.0) ** 2
            assert abs(plancherel_hyp(f, order) - lhs) < 1e-4 * lhs

    def test_h3_density_constant(self):
        # the inversion constant 1/(2 pi) pairs with |c(mu)|^-2 = mu^2 on H^3
        assert c_function_density(H3, 2.0) == pytest.approx(4.0, rel=1e-12)


class TestSphericalMeans:
    def test_zero_radius(self):
        s = np.array([0.0, 0.5, 2.0])
        assert np.array_equal(spherical_mean_hyp(Bump(1.0), H3, 0.0, s), Bump(1.0)(s))

    @given(st.sampled_from([0.5, 1.0, 2.0]), st.floats(0, 4), st.floats(0, 4))
    def test_constant(self, alpha, t, s):
        assert spherical_mean_hyp(Constant(1.0), OrderPair(alpha, -0.5), t, s) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_other_orders(self):
        with pytest.raises(ValueError):
            spherical_mean_hyp(GAUSS, OrderPair(1.0, 0.0), 1.0, 0.5)
        with pytest.raises(ValueError):
            MeanProfile(GAUSS, OrderPair(1.0, 0.0), 1.0)

    @given(st.floats(0.1, 3), st.floats(0, 3), st.floats(0, 3))
    @settings(max_examples=20)
    def test_eigenfunction(self, mu, t, s):
        # M^t phi_mu = phi_mu(t) phi_mu
        class Phi(Gaussian):
            def _eval(self, r):
                return np.real(jacobi_phi(H3, mu, r))

        val = spherical_mean_hyp(Phi(1.0), H3, t, s)
        assert abs(val - jacobi_phi(H3, mu, t).real * jacobi_phi(H3, mu, s).real) < 1e-9

    @pytest.mark.parametrize("t", [0.5, 1.0])
    def test_operational_property(self, t, gauss_hat):
        lam = np.array([1.0, 3.0])
        mt = jacobi_transform(MeanProfile(GAUSS, H3, t), H3, lam)
        assert np.max(np.abs(mt - jacobi_phi(H3, lam, t).real * gauss_hat(lam))) < 1e-6

    def test_spectral_mean_matches_geometric(self, gauss_hat):
        s = np.array([0.0, 0.3, 1.0, 2.2])
        spec = spherical_mean_spectral(GAUSS, H3, 0.7, s, fhat=gauss_hat)
        geo = spherical_mean_hyp(GAUSS, H3, 0.7, s)
        assert np.max(np.abs(spec - geo)) < 1e-7


class TestNormsAndGrowth:
    @pytest.mark.parametrize("t", [0.05, 0.3, 2.0])
    def test_two_l2_routes(self, t, gauss_hat):
        a = diff_norm_hyp(GAUSS, H3, 2.0, t, fhat=gauss_hat)
        b = diff_norm_hyp_spectral(GAUSS, H3, t, fhat=gauss_hat)
        assert abs(a - b) < 1e-4 * a

    def test_diff_zero_t(self):
        assert diff_norm_hyp(GAUSS, H3, 1.0, 0.0) == 0.0

    def test_l2_growth_zero_and_bound(self, gauss_hat):
        assert theorem6_lhs(GAUSS, H3, 0.0, fhat=gauss_hat) == 0.0
        full = math.sqrt(plancherel_hyp(GAUSS, H3, fhat=gauss_hat))
        for t in (0.1, 1.0, 10.0):
            assert theorem6_lhs(GAUSS, H3, t, fhat=gauss_hat) <= full * (1 + 1e-12)

    def test_l2_growth_riemann_sum(self, gauss_hat):
        t = 0.5
        mu = np.linspace(1e-9, 30, 600_001)
        y = np.minimum(1.0, (mu * t) ** 4) * np.abs(gauss_hat_h3(mu)) ** 2 * c_function_density(H3, mu)
        ref = math.sqrt(np.trapezoid(y, mu) / (2 * math.pi))
        assert abs(theorem6_lhs(GAUSS, H3, t, fhat=gauss_hat) - ref) < 1e-6 * ref

    def test_strip_growth_basics(self, gauss_hat):
        assert theorem5_lhs(GAUSS, H3, 1.0, 0.0, 0.0, fhat=gauss_hat) == 0.0
        for p, eta in ((1.0, 0.0), (1.0, 0.6), (1.5, 0.2)):
            t1 = theorem5_lhs(GAUSS, H3, p, eta, 1.0, fhat=gauss_hat)
            t2 = theorem5_lhs(GAUSS, H3, p, eta, 2.0, fhat=gauss_hat)
            assert t2 >= t1

    @pytest.mark.parametrize("p, eta", [(1.5, 0.34), (2.0, 0.0), (1.0, 1.0)])
    def test_strip_growth_rejects(self, p, eta, gauss_hat):
        with pytest.raises(ValueError):
            theorem5_lhs(GAUSS, H3, p, eta, 1.0, fhat=gauss_hat)

    def test_strip_halfwidth(self):
        assert strip_halfwidth(1.0, 2.0) == 2.0
        assert strip_halfwidth(1.5, 3.0) == pytest.approx(1.0)

    @given(st.floats(1e-2, 10), st.sampled_from([(1.0, 0.0), (1.0, 0.5), (1.5, 0.1)]))
    def test_tail_below_sup(self, t, pe):
        fh = _shared_hat()
        p, eta = pe
        assert corollary7_tail(GAUSS, H3, p, eta, t, fhat=fh) <= theorem5_lhs(GAUSS, H3, p, eta, t, fhat=fh)

    @given(st.floats(1e-2, 10))
    @settings(max_examples=10)
    def test_l2_tail_below_growth(self, t):
        fh = _shared_hat()
        assert corollary7_tail(GAUSS, H3, 2.0, 0.0, t, fhat=fh) <= theorem6_lhs(GAUSS, H3, t, fhat=fh) * (1 + 1e-9)


_HAT = {}


def _shared_hat():
    if "g" not in _HAT:
        _HAT["g"] = JacobiTransform(GAUSS, H3)
    return _HAT["g"]
