import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from growthfx import SCHEMA_VERSION
from growthfx.certify import (
    CertReport,
    certify_bessel_two_sided,
    certify_comparison,
    certify_jacobi_bullets,
    certify_mehler_identity,
    certify_symspace_min,
    corpus_profile,
    verify_growth_theorems,
)
from growthfx.euclid import Dimension
from growthfx.profiles import Bump, Gaussian
from growthfx.quad import GridSpec
from growthfx.specfun import OrderPair

from conftest import H3

BESSEL_GRID = GridSpec("log", 1e-6, 1e4, 2000)


def _strip_runtime(d):
    return {k: v for k, v in d.items() if k != "runtime_ms"}


@pytest.fixture(scope="module")
def bessel_half():
    return certify_bessel_two_sided(0.5, BESSEL_GRID)


class TestReport:
    def test_json_roundtrip(self, bessel_half):
        text = json.dumps(bessel_half.to_dict(), allow_nan=False)
        again = CertReport.from_dict(json.loads(text))
        assert json.dumps(again.to_dict(), allow_nan=False) == text

    def test_key_order(self, bessel_half):
        keys = list(bessel_half.to_dict())
        assert keys[:10] == ["schema_version", "check_id", "params", "grids", "inf_ratio",
                             "sup_ratio", "analytic_floor", "violations", "tolerance", "pass"]
        assert bessel_half.to_dict()["schema_version"] == SCHEMA_VERSION

    def test_rejects_inverted_ratios(self):
        with pytest.raises(ValueError):
            CertReport("x", {}, {}, 2.0, 1.0)

    def test_rejects_inconsistent_pass(self, bessel_half):
        d = bessel_half.to_dict()
        d["pass"] = not d["pass"]
        with pytest.raises(ValueError):
            CertReport.from_dict(d)

    def test_rejects_unknown_schema(self, bessel_half):
        d = dict(bessel_half.to_dict(), schema_version="other/9")
        with pytest.raises(ValueError):
            CertReport.from_dict(d)

    def test_nonfinite_encoded(self):
        rep = CertReport("x", {}, {}, 1.0, math.inf, violations=[{"observed": "inf"}])
        d = json.loads(json.dumps(rep.to_dict(), allow_nan=False))
        assert d["sup_ratio"] == "inf"
        assert CertReport.from_dict(d).sup_ratio == math.inf


class TestBessel:
    def test_passes_with_corrected_floor(self, bessel_half):
        rep = bessel_half
        assert rep.passed
        assert rep.analytic_floor == {"value": pytest.approx(1 / (1.5 * math.pi ** 2)),
                                      "provenance": "corrected-derivation"}
        assert rep.inf_ratio <= 1 / (4 * 1.5) + 1e-12

    def test_printed_floor_counterexample(self, bessel_half):
        pf = bessel_half.details["printed_floor"]
        assert pf["provenance"] == "paper-printed"
        assert not pf["holds_at_pi"]
        ce = pf["counterexample"]
        assert ce["x"] == math.pi
        assert ce["observed"] == pytest.approx(1 / math.pi ** 2, rel=1e-12)
        assert ce["floor"] == pytest.approx(1 / (1.5 * math.pi))

    def test_sup_location(self, bessel_half):
        # the maximum of 1 - sin x / x sits at the first root of tan x = x
        from scipy.optimize import brentq
        x0 = brentq(lambda x: math.tan(x) - x, 4.4, 4.6)
        peak = 1 - math.sin(x0) / x0
        assert peak - 1e-4 < bessel_half.sup_ratio <= peak + 1e-12
        assert bessel_half.details["argmax"] == pytest.approx(4.4934, abs=1e-2)

    @pytest.mark.parametrize("alpha, lo, hi", [(0.0, 0.2349, 1.4028), (1.0, 0.1199, 1.1322), (2.5, 0.0695, 1.0411)])
    def test_frozen_extrema(self, alpha, lo, hi):
        rep = certify_bessel_two_sided(alpha, BESSEL_GRID)
        assert rep.passed
        assert rep.inf_ratio == pytest.approx(lo, abs=1e-4)
        assert rep.sup_ratio == pytest.approx(hi, abs=1e-4)

    def test_refinement_stable(self, bessel_half):
        fine = certify_bessel_two_sided(0.5, GridSpec("log", 1e-6, 1e4, 4000))
        assert abs(fine.inf_ratio - bessel_half.inf_ratio) < 1e-3
        assert abs(fine.sup_ratio - bessel_half.sup_ratio) < 1e-3

    def test_rejects_alpha(self):
        with pytest.raises(ValueError):
            certify_bessel_two_sided(-0.5, BESSEL_GRID)

    def test_points(self, bessel_half):
        assert len(bessel_half.points) == 2000
        x, t, lhs, rhs, r = bessel_half.points[100]
        assert r == pytest.approx(lhs / rhs)


class TestMehler:
    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.5])
    def test_identity(self, alpha):
        rep = certify_mehler_identity(alpha, GridSpec("log", 1e-6, 50, 400))
        assert rep.passed
        assert rep.details["max_abs_discrepancy"] < 1e-9

    def test_zero_argument(self):
        rep = certify_mehler_identity(0.0, GridSpec("linear", 0.0, 1.0, 5))
        assert rep.passed


class TestJacobi:
    def test_bullets(self):
        rep = certify_jacobi_bullets(H3, GridSpec("linear", 0, 50, 51),
                                     [-1, -0.5, 0, 0.5, 1], GridSpec("linear", 0, 10, 41))
        assert rep.passed
        assert rep.sup_ratio <= 1 + 1e-9
        assert rep.details["envelope_constant"] == pytest.approx(1.818, abs=1e-3)

    @pytest.mark.parametrize("order", [OrderPair(1.0, 0.0), OrderPair(2.5, 0.5)])
    def test_bullets_other_orders(self, order):
        rho = order.rho
        rep = certify_jacobi_bullets(order, GridSpec("linear", 0, 20, 11), [-rho, 0, rho / 2],
                                     GridSpec("linear", 0, 8, 17))
        assert rep.passed

    def test_outside_strip(self):
        with pytest.raises(ValueError):
            certify_jacobi_bullets(H3, GridSpec("linear", 0, 1, 3), [1.5], GridSpec("linear", 0, 1, 3))


class TestComparison:
    def test_h3_floor(self):
        rep = certify_comparison(H3, 1.0, GridSpec("log", 1e-3, 1e2, 200), [0.0])
        assert rep.passed
        assert rep.analytic_floor == {"value": pytest.approx(1 / math.sinh(1)), "provenance": "paper-printed"}
        assert rep.inf_ratio == pytest.approx(0.9735, abs=1e-3)
        assert rep.inf_ratio >= 1 / math.sinh(1) - 1e-6

    def test_skips_underflow(self):
        rep = certify_comparison(H3, 1.0, GridSpec("log", 1e-9, 1e-6, 10), [0.0],
                                 t_grid=GridSpec("log", 1e-3, 1.0, 5))
        assert rep.details["skipped"] > 0
        assert len(rep.points) + rep.details["skipped"] == 50

    @pytest.mark.parametrize("order, floor", [(OrderPair(1.0, 0.0), 0.95716), (OrderPair(2.5, 0.5), 0.97613)])
    def test_other_orders(self, order, floor):
        rep = certify_comparison(order, 1.0, GridSpec("log", 1e-3, 1e2, 200), [0.0])
        assert rep.passed and rep.analytic_floor is None
        assert rep.inf_ratio == pytest.approx(floor, abs=1e-4)

    def test_t_grid_beyond_t0(self):
        with pytest.raises(ValueError):
            certify_comparison(H3, 1.0, GridSpec("log", 1e-3, 1, 5), [0.0], t_grid=GridSpec("linear", 0.1, 2, 5))


class TestSymspace:
    def test_min_and_large_t(self):
        rep = certify_symspace_min(H3, 0.9, GridSpec("log", 1e-2, 1e2, 200), GridSpec("log", 1e-2, 10, 60))
        assert rep.passed
        assert rep.inf_ratio == pytest.approx(0.1585, abs=1e-3)
        assert rep.details["large_t"]["ratio"] == pytest.approx(1.0, abs=1e-3)

    @pytest.mark.parametrize("eta0", [0.0, 1.0, 1.2])
    def test_eta_range(self, eta0):
        with pytest.raises(ValueError):
            certify_symspace_min(H3, eta0, GridSpec("log", 1, 2, 3), GridSpec("log", 1, 2, 3))


class TestCorpus:
    def test_defaults(self):
        assert corpus_profile("gaussian", "hyp").to_dict() == Gaussian(1 / math.sqrt(2)).to_dict()
        assert corpus_profile("bump:radius=2").to_dict() == Bump(2.0).to_dict()

    def test_unknown(self):
        with pytest.raises(ValueError):
            corpus_profile("ball", "hyp")

    @given(st.floats(0.2, 5))
    def test_parameter_form(self, r):
        assert corpus_profile(f"bump:radius={r!r}").radius == r


class TestVerify:
    def test_euclid_p2(self):
        rep = verify_growth_theorems([Gaussian(1.0)], Dimension(3), 2.0, GridSpec("log", 1e-2, 10, 5))
        assert rep.passed and rep.check_id == "verify-euclid.p2"
        lo, hi = rep.details["containment_interval"]
        assert lo == pytest.approx(0.8215, abs=1e-3) and hi == pytest.approx(6.3051, abs=1e-3)
        assert lo <= rep.inf_ratio <= rep.sup_ratio <= hi

    def test_euclid_p1(self):
        rep = verify_growth_theorems([Bump(1.0)], Dimension(2), 1.0, GridSpec("log", 1e-2, 10, 4))
        assert rep.passed
        assert rep.sup_ratio <= rep.details["upper_constant"]

    def test_hyp_p1(self):
        rep = verify_growth_theorems([Gaussian(1 / math.sqrt(2))], H3, 1.0, GridSpec("log", 1e-2, 10, 4),
                                     mu_grid=GridSpec("log", 1e-3, 1e2, 300))
        assert rep.passed and rep.check_id == "verify-hyp.p1"
        assert any("strip" in n for n in rep.notes)
        assert rep.params["corpus"] == [Gaussian(1 / math.sqrt(2)).to_dict()]

    def test_hyp_strip_rejected(self):
        with pytest.raises(ValueError):
            verify_growth_theorems([Bump(1.0)], H3, 1.5, GridSpec("log", 1e-2, 1, 3), eta=0.4)

    def test_empty_corpus(self):
        with pytest.raises(ValueError):
            verify_growth_theorems([], Dimension(3), 2.0, GridSpec("log", 1e-2, 1, 3))

    def test_deterministic(self):
        args = ([Bump(1.0)], Dimension(3), 2.0, GridSpec("log", 1e-2, 10, 3))
        a, b = verify_growth_theorems(*args), verify_growth_theorems(*args)
        assert _strip_runtime(a.to_dict()) == _strip_runtime(b.to_dict())
        assert a.points == b.points
