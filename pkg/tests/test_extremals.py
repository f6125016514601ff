"""Closed-form extremals: validation, golden values, and agreement with their own ODEs."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from godel.errors import ValidationError
from godel.extremals import (
    ALPHA_ISOTROPIC,
    ISOTROPIC,
    TIMELIKE,
    GeodesicParams,
    adjoint_rhs,
    closed_form_array,
    closed_form_position,
    control,
    control_at,
    max_abs_phi3,
    params_from_initial,
    pmp_check,
    psi_at,
    sample_curve,
    theta,
    unwrapped_atan_tan,
)
from godel.group import SQRT2, left_translate_tangent

SQRT3 = math.sqrt(3.0)


@st.composite
def causal_params(draw):
    kind = draw(st.sampled_from([ISOTROPIC, TIMELIKE]))
    phi0 = 1.0 if kind == ISOTROPIC else draw(st.floats(1.0, 4.0))
    frac = draw(st.floats(-0.95, 0.95))
    phi3 = frac * max_abs_phi3(kind, phi0)
    p = GeodesicParams.make(kind, phi0, phi3)
    t0 = draw(st.floats(0.0, 1.0)) * 2.0 * math.pi / p.omega
    p = GeodesicParams.make(kind, phi0, phi3, t0)
    assume(not p.is_line)
    return p


class TestParams:
    def test_isotropic_needs_phi0_one(self):
        with pytest.raises(ValidationError):
            GeodesicParams(ISOTROPIC, 1.5, 0.0, math.sqrt(1.25))

    def test_timelike_needs_phi0_at_least_one(self):
        with pytest.raises(ValidationError, match="phi0 >= 1"):
            GeodesicParams.make(TIMELIKE, 0.5)

    def test_phi3_bound(self):
        with pytest.raises(ValidationError, match=r"\|phi3\|"):
            GeodesicParams.make(ISOTROPIC, 1.0, 1.2)
        with pytest.raises(ValidationError):
            GeodesicParams.make(TIMELIKE, 2.0, 1.8)

    def test_bound_is_a_line(self):
        assert GeodesicParams.make(ISOTROPIC, 1.0, 1.0).is_line
        assert GeodesicParams.make(TIMELIKE, 2.0, math.sqrt(3.0)).is_line

    def test_normalization_checked(self):
        with pytest.raises(ValidationError, match="normalization"):
            GeodesicParams(TIMELIKE, 2.0, 0.0, 1.0)

    def test_record_roundtrip(self):
        p = GeodesicParams.make(TIMELIKE, 2.0, 0.5, 0.3)
        assert GeodesicParams.from_record(p.to_record()) == p
        assert set(p.to_record()) == {"class", "phi0", "phi3", "b", "t0"}

    def test_derived_constants(self):
        p = GeodesicParams.make(TIMELIKE, SQRT3)
        assert p.b == pytest.approx(SQRT2)
        assert p.omega == pytest.approx(2.0)
        assert p.alpha == pytest.approx(2.0 - SQRT3)
        assert GeodesicParams.make(ISOTROPIC).alpha == pytest.approx(ALPHA_ISOTROPIC)


class TestParamsFromInitial:
    def test_simple_isotropic(self):
        p = params_from_initial(ISOTROPIC, (1.0, 0.0, 1.0, 0.0))
        assert (p.b, p.t0, p.phi3) == (1.0, 0.0, 0.0)

    def test_quarter_turn(self):
        p = params_from_initial(ISOTROPIC, (1.0, -1.0, 0.0, 0.0))
        assert p.t0 == pytest.approx(3.0 * math.pi / 4.0)

    def test_half_turn(self):
        p = params_from_initial(TIMELIKE, (SQRT3, 0.0, -SQRT2, 0.0))
        assert p.t0 == pytest.approx(math.pi / p.omega)

    def test_central_sign(self):
        p = params_from_initial(TIMELIKE, (2.0, 0.0, math.sqrt(2.75), 0.5))
        assert p.phi3 == -0.5

    def test_line(self):
        p = params_from_initial(ISOTROPIC, (1.0, 0.0, 0.0, 1.0))
        assert p.is_line and p.phi3 == -1.0

    def test_rejects_unnormalized(self):
        with pytest.raises(ValidationError):
            params_from_initial(ISOTROPIC, (1.0, 0.5, 0.5, 0.0))
        with pytest.raises(ValidationError):
            params_from_initial(TIMELIKE, (1.5, 0.0, 0.0, 0.0))

    @given(st.floats(-math.pi, math.pi), st.floats(1.0, 3.0), st.floats(-0.9, 0.9))
    def test_recovers_covector(self, angle, phi0, frac):
        phi3 = frac * max_abs_phi3(TIMELIKE, phi0)
        b = math.sqrt(phi0**2 - phi3**2 - 1.0)
        assume(b > 1e-6)
        psi = np.array([phi0, -b * math.sin(angle), b * math.cos(angle), -phi3])
        p = params_from_initial(TIMELIKE, psi)
        assert np.allclose(psi_at(p, 0.0), psi, atol=1e-9)


class TestUnwrappedArctan:
    def test_principal_branch(self):
        s = np.linspace(-1.5, 1.5, 31)
        assert np.allclose(unwrapped_atan_tan(0.3, s), np.arctan(0.3 * np.tan(s)))

    def test_monotone_across_branches(self):
        s = np.linspace(-20, 20, 200001)
        assert np.all(np.diff(unwrapped_atan_tan(0.17, s)) > 0)

    def test_shift_by_pi(self):
        assert unwrapped_atan_tan(0.4, 1.0 + math.pi) == pytest.approx(unwrapped_atan_tan(0.4, 1.0) + math.pi)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            unwrapped_atan_tan(0.0, 1.0)


class TestGoldenValues:
    def test_isotropic_quarter_period(self):
        x = closed_form_position(GeodesicParams.make(ISOTROPIC), math.pi / 2)
        expected = (math.pi * (SQRT2 - 2) / 4, math.log(2 - SQRT2), 1 + SQRT2, 0.0)
        assert np.allclose(x, expected, atol=1e-12, rtol=0)
        assert x.x0 == pytest.approx(-0.460076, abs=1e-6)

    def test_timelike_quarter_turn(self):
        x = closed_form_position(GeodesicParams.make(TIMELIKE, SQRT3), math.pi / 2)
        expected = (math.pi * (SQRT2 - SQRT3 / 2), math.log(2 - SQRT3), 0.0, 0.0)
        assert np.allclose(x, expected, atol=1e-12, rtol=0)

    def test_isotropic_full_period(self):
        x = closed_form_position(GeodesicParams.make(ISOTROPIC), 2 * math.pi)
        assert x.x0 == pytest.approx(2 * math.pi * (SQRT2 - 1), abs=1e-12)
        assert abs(x.x1) < 1e-14 and abs(x.x2) < 1e-14

    def test_line(self):
        p = GeodesicParams.make(TIMELIKE, 2.0, math.sqrt(3.0))
        assert closed_form_position(p, 1.5) == (3.0, 0.0, 0.0, 1.5 * math.sqrt(3.0))

    def test_starts_at_unit(self):
        p = GeodesicParams.make(TIMELIKE, 2.0, 0.4, 1.1)
        assert np.allclose(closed_form_position(p, 0.0), 0.0, atol=1e-15)


class TestClosedFormSolvesTheSystem:
    """Finite differences of the closed form against the ODEs it is meant to solve."""

    @given(causal_params(), st.floats(-6, 6))
    @settings(max_examples=60, deadline=None)
    def test_velocity_is_left_translated_control(self, p, t):
        h = 1e-5
        fd = (closed_form_array(p, t + h) - closed_form_array(p, t - h)) / (2 * h)
        g = closed_form_position(p, t)
        expected = left_translate_tangent(g, control_at(p, t))
        assert np.allclose(fd, expected, atol=1e-6 * max(1.0, p.phi0**2))

    @given(causal_params(), st.floats(-6, 6))
    @settings(max_examples=60, deadline=None)
    def test_covector_solves_adjoint_equation(self, p, t):
        h = 1e-5
        fd = (psi_at(p, t + h) - psi_at(p, t - h)) / (2 * h)
        assert np.allclose(fd, adjoint_rhs(psi_at(p, t), p.phi0), atol=1e-6 * max(1.0, p.phi0**3))

    @given(causal_params(), st.floats(-10, 10))
    def test_conserved_quantities(self, p, t):
        psi = psi_at(p, t)
        u = control(psi).array
        uu = u[0] ** 2 - u[1] ** 2 - u[2] ** 2 - u[3] ** 2
        assert psi[0] == p.phi0 and psi[3] == -p.phi3
        assert psi[1] ** 2 + psi[2] ** 2 == pytest.approx(p.b**2, rel=1e-12, abs=1e-12)
        assert uu == pytest.approx(1.0 if p.kind == TIMELIKE else 0.0, abs=1e-9)

    @given(causal_params())
    def test_theta_vanishes_at_t0(self, p):
        assert theta(p, p.t0) == 0.0

    @given(causal_params(), st.floats(-5, 5))
    def test_x1_stays_in_box(self, p, t):
        x1 = closed_form_array(p, t)[1]
        assert math.log(p.alpha) - 1e-12 <= x1 <= -math.log(p.alpha) + 1e-12


class TestSampling:
    def test_sample_curve(self):
        c = sample_curve(GeodesicParams.make(ISOTROPIC), np.linspace(0, 1, 11))
        assert len(c) == 11
        t, g = next(iter(c))
        assert t == 0.0 and g.x0 == 0.0

    def test_times_must_increase(self):
        with pytest.raises(ValueError):
            sample_curve(GeodesicParams.make(ISOTROPIC), [0.0, 1.0, 1.0])


class TestMinimumPrinciple:
    @pytest.mark.parametrize("t", [0.0, 1.0, 2.0])
    def test_minimum_at_control(self, t):
        rep = pmp_check(GeodesicParams.make(TIMELIKE, 2.0, 0.5, 0.7), t)
        assert rep.minimum == pytest.approx(1.0, abs=1e-9)
        assert rep.argmin_distance < 1e-6
        assert rep.pairing == pytest.approx(rep.norm)
        assert rep.adjoint_residual < 1e-12

    def test_isotropic_skips_minimization(self):
        rep = pmp_check(GeodesicParams.make(ISOTROPIC), 0.5)
        assert rep.minimum is None and rep.pairing == pytest.approx(0.0, abs=1e-12)

    def test_control_needs_future_direction(self):
        with pytest.raises(ValidationError):
            control((0.0, 1.0, 0.0, 0.0))
