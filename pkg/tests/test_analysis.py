"""Periods, drift, the closure audit, the integral identity and the bounding scan."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from godel import analysis
from godel.errors import DomainError
from godel.extremals import ALPHA_ISOTROPIC, ISOTROPIC, TIMELIKE, GeodesicParams, closed_form_position, max_abs_phi3
from godel.group import SQRT2
from godel.oracle import extremum_scan, oracle_positions

SQRT3 = math.sqrt(3.0)
T_ISO = 2 * math.pi * (SQRT2 - 1)


@st.composite
def oscillating(draw):
    kind = draw(st.sampled_from([ISOTROPIC, TIMELIKE]))
    phi0 = 1.0 if kind == ISOTROPIC else draw(st.floats(1.0, 5.0))
    phi3 = draw(st.floats(-0.9, 0.9)) * max_abs_phi3(kind, phi0)
    p = GeodesicParams.make(kind, phi0, phi3, draw(st.floats(0.0, 6.0)))
    assume(not p.is_line)
    return p


class TestPeriodDrift:
    def test_isotropic(self):
        p = GeodesicParams.make(ISOTROPIC)
        assert analysis.period(p) == pytest.approx(2 * math.pi)
        assert analysis.drift_per_period(p) == pytest.approx(T_ISO, abs=1e-12)
        assert T_ISO == pytest.approx(2.6025806, abs=1e-7)

    def test_timelike(self):
        p = GeodesicParams.make(TIMELIKE, SQRT3)
        assert analysis.period(p) == pytest.approx(math.pi)
        assert analysis.drift_per_period(p) == pytest.approx(2 * math.pi * (SQRT2 - SQRT3 / 2), abs=1e-12)

    def test_lines_have_no_period(self):
        line = GeodesicParams.make(ISOTROPIC, 1.0, 1.0)
        with pytest.raises(DomainError):
            analysis.period(line)
        with pytest.raises(DomainError):
            analysis.drift_per_period(line)

    @given(oscillating())
    def test_drift_positive_and_matches_closed_form(self, p):
        drift = analysis.drift_per_period(p)
        assert drift > 0
        assert closed_form_position(p, analysis.period(p)).x0 == pytest.approx(drift, abs=1e-10 * max(1.0, p.phi0))

    def test_drift_on_oracle(self):
        p = GeodesicParams.make(TIMELIKE, SQRT3)
        x = oracle_positions([p], np.array([0.0, math.pi]))[0]
        assert x[1, 0] == pytest.approx(analysis.drift_per_period(p), abs=1e-8)

    def test_shift_constant_in_t(self):
        assert analysis.period_shift_residual() <= 1e-10

    def test_shift_on_oracle(self):
        p = GeodesicParams.make(ISOTROPIC)
        times = np.array([0.0, 0.7, 0.7 + 2 * math.pi, 2.0, 2.0 + 2 * math.pi])
        x0 = oracle_positions([p], times)[0][:, 0]
        assert x0[2] - x0[1] == pytest.approx(T_ISO, abs=1e-8)
        assert x0[4] - x0[3] == pytest.approx(T_ISO, abs=1e-8)


class TestAudit:
    def test_isotropic_returns_only_at_period(self):
        rep = analysis.audit_params(GeodesicParams.make(ISOTROPIC))
        assert rep.verdict == analysis.NO_CLOSURE
        assert rep.return_gap < 1e-12 and rep.drift == pytest.approx(T_ISO)
        assert not rep.spurious_returns

    def test_returns_found_at_period(self):
        p = GeodesicParams.make(TIMELIKE, SQRT3, 0.0, 0.3)
        found = analysis.simultaneous_returns(p)
        assert found and all(abs(t - math.pi) < 1e-6 for t, _ in found)

    def test_central_motion_excludes_closure(self):
        rep = analysis.audit_params(GeodesicParams.make(TIMELIKE, 2.0, 0.5))
        assert rep.verdict == analysis.NO_CLOSURE and "x3" in rep.reason

    def test_line(self):
        rep = analysis.audit_params(GeodesicParams.make(TIMELIKE, 2.0, math.sqrt(3.0)))
        assert rep.verdict == analysis.NO_CLOSURE and rep.period is None

    @given(oscillating())
    @settings(max_examples=15, deadline=None)
    def test_property_no_closure(self, p):
        assert analysis.audit_params(p, resolution=1e-3).verdict == analysis.NO_CLOSURE

    def test_record(self):
        rec = analysis.audit_params(GeodesicParams.make(ISOTROPIC)).to_record()
        assert rec["params"]["class"] == ISOTROPIC and rec["verdict"] == analysis.NO_CLOSURE


class TestIntegral:
    def test_value(self):
        assert analysis.cos_ratio_integral() == pytest.approx(-math.pi, abs=1e-9)

    def test_gives_drift(self):
        value = analysis.cos_ratio_integral()
        assert -2 * math.sqrt(ALPHA_ISOTROPIC) * value == pytest.approx(analysis.drift_per_period(GeodesicParams.make(ISOTROPIC)), abs=1e-9)

    def test_constant_denominator(self):
        assert analysis.cos_ratio_integral(1.0) == pytest.approx(0.0, abs=1e-12)

    def test_closed_form_of_integral(self):
        """Splitting cos t / (A + B cos t) = (1 - A / (A + B cos t)) / B gives 2 pi (1 - A / sqrt(A^2 - B^2)) / B."""
        for al in (0.1, 0.5, 0.9):
            expected = 2 * math.pi * (1 - (1 + al) / (2 * math.sqrt(al))) / (1 - al)
            assert analysis.cos_ratio_integral(al) == pytest.approx(expected, abs=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            analysis.cos_ratio_integral(0.0)


class TestAlphaBounds:
    def test_sqrt3(self):
        assert analysis.timelike_alpha(SQRT3) == pytest.approx(2 - SQRT3)

    def test_default_grid(self):
        rep = analysis.alpha_bounds_check()
        assert rep.strict
        assert rep.alpha_gap[-1] <= 1e-5
        assert rep.alpha[0] == pytest.approx(1.0, abs=3e-3)
        assert rep.omega_gap[0] < 1e-5

    def test_limit_at_100(self):
        assert analysis.timelike_alpha(100.0) - ALPHA_ISOTROPIC < 1e-3

    def test_rejects_phi0_one(self):
        with pytest.raises(DomainError):
            analysis.alpha_bounds_check([1.0])


class TestBounds:
    def test_isotropic_t0_zero_reaches_claimed_bound(self):
        p = GeodesicParams.make(ISOTROPIC)
        assert analysis.x2_sharp_bound(p) == pytest.approx(2 + SQRT2)

    def test_family_bound_is_four(self):
        assert analysis.x2_family_bound(GeodesicParams.make(ISOTROPIC)) == pytest.approx(4.0)

    @given(oscillating())
    @settings(max_examples=25, deadline=None)
    def test_sharp_bound_against_scan(self, p):
        period = analysis.period(p)
        scan = extremum_scan(lambda t: abs(closed_form_position(p, t).x2), np.linspace(0, period, 4001))
        sharp = analysis.x2_sharp_bound(p)
        assert scan.max <= sharp + 1e-9
        assert scan.max == pytest.approx(sharp, abs=1e-4 * max(1.0, sharp))
        assert sharp <= analysis.x2_family_bound(p) + 1e-12

    def test_t0_sweep_exceeds_claimed_bound(self):
        """sup |x2| over the t0 family is 4, reached at t0 = pi/4, not 2 + sqrt2."""
        rep = analysis.bounding_scan(analysis.isotropic_t0_sweep(64), samples_per_period=4000)
        assert rep.hard_ok
        assert rep.x2_sup == pytest.approx(4.0, abs=1e-9)
        assert rep.x2_sup_at["params"]["t0"] % (math.pi / 2) == pytest.approx(math.pi / 4)
        assert not rep.claimed_x2_ok

    def test_claimed_bound_exceeded_on_oracle(self):
        """Numerical integration alone, t0 = pi/4: |x2| reaches 4 at t = 3 pi / 2."""
        p = GeodesicParams.make(ISOTROPIC, t0=math.pi / 4)
        times = np.linspace(0.0, 2 * math.pi, 2001)
        x2 = oracle_positions([p], times)[0][:, 2]
        assert np.max(np.abs(x2)) == pytest.approx(4.0, abs=1e-6)
        assert np.max(np.abs(x2)) > 2 + SQRT2 + 0.5

    def test_x1_excursion_and_f_violation(self):
        grid = [GeodesicParams.make(ISOTROPIC, t0=math.pi), GeodesicParams.make(TIMELIKE, 2.0)]
        rep = analysis.bounding_scan(grid, samples_per_period=4000)
        assert rep.x1_max == pytest.approx(-math.log(ALPHA_ISOTROPIC), abs=1e-9)
        assert rep.x1_max > 0.7 and rep.d_violations
        f_params = {v["params"]["phi0"] for v in rep.f_violations}
        assert 2.0 in f_params
        v = next(v for v in rep.f_violations if v["params"]["phi0"] == 2.0)
        assert v["x"][0] < 0 and v["t"] < 0.1

    def test_x1_within_derived_box(self):
        rep = analysis.bounding_scan(analysis.default_bound_grid(), samples_per_period=2000)
        lo, hi = rep.x1_box
        assert lo - 1e-9 <= rep.x1_min and rep.x1_max <= hi + 1e-9

    def test_lines_respect_f(self):
        rep = analysis.bounding_scan([GeodesicParams.make(ISOTROPIC, 1.0, 1.0), GeodesicParams.make(TIMELIKE, 2.0, -math.sqrt(3.0))], samples_per_period=100)
        assert not rep.f_violations and rep.x2_sup == 0.0

    def test_empty(self):
        with pytest.raises(DomainError):
            analysis.bounding_scan([])
