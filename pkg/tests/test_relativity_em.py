"""Tests for the relativistic classification and the two-form machinery."""

from __future__ import annotations

import math

import numpy as np
import pytest

from geomech.dynamics import (
    ForceForm,
    NewtonField,
    VectorFieldOnM,
    integrate,
    intermediate_residual,
    newton_accel_exprs,
    observable_series,
)
from geomech.exprdsl import parse
from geomech.geometry import GeometryError, MetricSpec, State
from geomech.relativity_em import (
    TwoForm,
    closedness_residual,
    contact_membership_residual,
    corrected_force_form,
    current_divergence_residual,
    exterior_derivative_lowered,
    lorentz_force_form,
    maxwell_current,
    maxwell_theorem_check,
    potential_residual,
    relativistic_correction,
    relativistic_residual,
)
from geomech.sampling import sample_box, sample_states


FLAT2 = MetricSpec.euclidean(2)
FLAT3 = MetricSpec.euclidean(3)
MINKOWSKI4 = MetricSpec.diagonal(["-1", "1", "1", "1"])


def conservative(metric, source):
    return NewtonField(metric, ForceForm.from_potential(parse(source, metric.dim)))


# ---------------------------------------------------------------------------
# Two-form plumbing.
# ---------------------------------------------------------------------------


class TestTwoForm:
    def test_reversed_indices_normalize_with_sign(self):
        f = TwoForm.of(3, [(2, 0, "x1")])
        x = np.array([5.0, 0.0, 0.0])
        assert f.component(0, 2).eval(x) == -5.0
        assert f.component(2, 0).eval(x) == 5.0
        assert f.component(0, 1).eval(x) == 0.0

    def test_values_matrix_antisymmetric(self):
        f = TwoForm.of(3, [(0, 1, "x3"), (1, 2, "2")])
        m = f.values(np.array([0.0, 0.0, 4.0]))
        assert np.allclose(m, -m.T)
        assert m[0, 1] == 4.0 and m[1, 2] == 2.0

    def test_rejections(self):
        with pytest.raises(GeometryError):
            TwoForm.of(2, [(0, 0, "1")])
        with pytest.raises(GeometryError):
            TwoForm.of(2, [(0, 3, "1")])
        with pytest.raises(GeometryError):
            TwoForm.of(2, [(0, 1, "v1")])
        with pytest.raises(GeometryError):
            TwoForm.of(2, [(0, 1, "1"), (1, 0, "1")])


class TestLorentzForce:
    def test_unit_field_components(self):
        force = lorentz_force_form(TwoForm.of(2, [(0, 1, "1")]))
        x, v = np.zeros(2), np.array([3.0, 5.0])
        # A_1 = xd^2 F_21 = -xd^2, A_2 = xd^1 F_12 = xd^1.
        assert force.values(x, v) == pytest.approx([-5.0, 3.0])

    def test_lorentz_force_is_contact(self):
        force = lorentz_force_form(TwoForm.of(2, [(0, 1, "1 + x1^2")]))
        states = sample_states([(-2, 2), (-2, 2)], 100, seed=4)
        assert contact_membership_residual(force, states) < 1e-12

    def test_gradient_force_is_not_contact(self):
        force = ForceForm.from_potential(parse("x1", 2))
        states = sample_states([(-2, 2), (-2, 2)], 100, seed=4)
        assert contact_membership_residual(force, states) > 0.1


@pytest.fixture(scope="module")
def trajectory():
    field = NewtonField(FLAT2, lorentz_force_form(TwoForm.of(2, [(0, 1, "1")])))
    return integrate(field, State([0.0, 2.0], [1.0, 0.0]), t_end=10.0, dt=1e-3)


class TestCyclotron:
    """Unit magnetic two-form on the flat plane, started at (0, 2) with
    unit horizontal velocity: the orbit is the unit circle about (0, 1)
    with period 2 pi."""

    def test_radius_about_center(self, trajectory):
        radii = np.hypot(trajectory.xs[:, 0], trajectory.xs[:, 1] - 1.0)
        assert np.max(np.abs(radii - 1.0)) < 1e-6

    def test_period(self, trajectory):
        angles = np.unwrap(
            np.arctan2(trajectory.xs[:, 1] - 1.0, trajectory.xs[:, 0])
        )
        swept = abs(angles[-1] - angles[0])
        period = 2.0 * math.pi * trajectory.times[-1] / swept
        assert period == pytest.approx(2.0 * math.pi, abs=1e-6)

    def test_speed_is_conserved(self, trajectory):
        series = observable_series(FLAT2, trajectory, "theta_dot")
        assert np.max(np.abs(series - series[0])) < 1e-10


# ---------------------------------------------------------------------------
# Relativistic classification and correction.
# ---------------------------------------------------------------------------


class TestRelativisticResidual:
    def test_lorentz_field_is_relativistic(self):
        field = NewtonField(
            FLAT2, lorentz_force_form(TwoForm.of(2, [(0, 1, "x1 * x2")]))
        )
        states = sample_states([(0.5, 1.5), (0.5, 1.5)], 50, seed=6)
        assert relativistic_residual(field, states) < 1e-12

    def test_gradient_field_is_not(self):
        states = sample_states([(0.5, 1.5), (0.5, 1.5)], 50, seed=6)
        assert relativistic_residual(conservative(FLAT2, "x1"), states) > 0.1

    def test_rate_identity_against_work_pairing(self):
        # D(thetadot) = -2 A_i xd^i pointwise, for any force on any chart.
        polar = MetricSpec([["1", "0"], ["0", "x1^2"]])
        force = ForceForm.of(["x1 * v2", "x2"], 2)
        field = NewtonField(polar, force)
        states = sample_states([(0.6, 1.6), (0.2, 1.2)], 50, seed=8)
        for s in states:
            me = polar.eval(s.x)
            a = field.accel(s.x, s.v)
            rate = float(
                np.einsum("kij,k,i,j->", me.dg, s.v, s.v, s.v)
                + 2.0 * (s.v @ me.g @ a)
            )
            work = float(force.values(s.x, s.v) @ s.v)
            assert abs(rate + 2.0 * work) < 1e-12


class TestCorrectedForce:
    def test_matches_theta_constrained_field(self):
        base = conservative(FLAT2, "x1 * x2")
        corrected = NewtonField(FLAT2, corrected_force_form(base))
        constrained = relativistic_correction(base)
        states = sample_states(
            [(0.2, 1.2), (0.2, 1.2)], 50, seed=10, vbox=[(0.3, 1.3), (0.2, 1.0)]
        )
        for s in states:
            gap = np.abs(corrected.accel(s.x, s.v) - constrained.accel(s.x, s.v))
            assert np.max(gap) < 1e-12

    def test_corrected_force_is_contact(self):
        base = conservative(FLAT2, "x1 * x2")
        corrected = corrected_force_form(base)
        states = sample_states(
            [(0.2, 1.2), (0.2, 1.2)], 50, seed=10, vbox=[(0.3, 1.3), (0.2, 1.0)]
        )
        assert contact_membership_residual(corrected, states) < 1e-12

    def test_corrected_field_conserves_speed(self):
        base = conservative(FLAT2, "x1 * x2")
        corrected = NewtonField(FLAT2, corrected_force_form(base))
        tr = integrate(corrected, State([0.3, 0.8], [1.0, 0.2]), t_end=5.0, dt=1e-3)
        series = observable_series(FLAT2, tr, "theta_dot")
        assert np.max(np.abs(series - series[0])) / abs(series[0]) < 1e-8


class TestSymbolicAccel:
    def test_closed_form_matches_numeric_route(self):
        polar = MetricSpec([["1", "0"], ["0", "x1^2"]])
        force = ForceForm.of(["x2 * v2", "x1"], 2)
        field = NewtonField(polar, force)
        exprs = newton_accel_exprs(polar, force)
        states = sample_states([(0.6, 1.6), (0.2, 1.2)], 30, seed=12)
        for s in states:
            symbolic = np.array([e.eval(s.x, s.v) for e in exprs])
            assert np.max(np.abs(symbolic - field.accel(s.x, s.v))) < 1e-12


# ---------------------------------------------------------------------------
# Currents and the field-source report.
# ---------------------------------------------------------------------------


class TestMaxwellCurrent:
    def test_flat_linear_field_current(self):
        # F_12 = x1 on flat R^3 sources the constant current (0, -1, 0).
        f = TwoForm.of(3, [(0, 1, "x1")])
        current = maxwell_current(FLAT3, f)
        for x in sample_box([(-2, 2)] * 3, 20, seed=1):
            assert current.values(x) == pytest.approx([0.0, -1.0, 0.0])

    def test_current_divergence_vanishes_flat(self):
        f = TwoForm.of(3, [(0, 1, "x1 * x2 + sin(x3)"), (1, 2, "exp(x1)")])
        current = maxwell_current(FLAT3, f)
        pts = sample_box([(-1, 1)] * 3, 25, seed=2)
        assert current_divergence_residual(FLAT3, current, pts) < 1e-10

    def test_current_divergence_vanishes_curved(self):
        spherical = MetricSpec.diagonal(["1", "x1^2", "x1^2 * sin(x2)^2"])
        f = TwoForm.of(3, [(0, 1, "x1^2"), (1, 2, "cos(x2)")])
        current = maxwell_current(spherical, f)
        pts = sample_box([(0.8, 1.8), (0.6, 2.4), (0.0, 3.0)], 25, seed=3)
        assert current_divergence_residual(spherical, current, pts) < 1e-10

    def test_codiff_sign_flips_current(self):
        f = TwoForm.of(3, [(0, 1, "x1")])
        plus = maxwell_current(FLAT3, f, codiff_sign=1.0)
        minus = maxwell_current(FLAT3, f, codiff_sign=-1.0)
        x = np.array([0.4, -0.3, 0.9])
        assert plus.values(x) == pytest.approx(-minus.values(x))

    def test_gauge_route_matches_direct_route(self):
        # Build F from a potential field, then compare the current of F
        # against the current of F plus an exact-gradient regauging.
        a1 = VectorFieldOnM.of(["0", "sin(x1)", "x1 * x3"], 3)
        f1 = exterior_derivative_lowered(FLAT3, a1)
        chi = parse("x1^2 * x2 + cos(x3)", 3)
        a2 = VectorFieldOnM.of(
            [str(a1.comps[k] + chi.diff(f"x{k + 1}")) for k in range(3)], 3
        )
        f2 = exterior_derivative_lowered(FLAT3, a2)
        j1 = maxwell_current(FLAT3, f1)
        j2 = maxwell_current(FLAT3, f2)
        for x in sample_box([(-1, 1)] * 3, 20, seed=5):
            assert np.max(np.abs(j1.values(x) - j2.values(x))) < 1e-12


class TestClosednessAndPotential:
    def test_exact_two_form_is_closed(self):
        u = VectorFieldOnM.of(["x2 * x3", "sin(x1)", "x1^2"], 3)
        f = exterior_derivative_lowered(FLAT3, u)
        pts = sample_box([(-1, 1)] * 3, 20, seed=7)
        assert closedness_residual(f, pts) < 1e-12
        assert potential_residual(FLAT3, u, f, pts) < 1e-12

    def test_open_two_form_detected(self):
        f = TwoForm.of(3, [(0, 1, "sin(x3)")])
        pts = sample_box([(-1, 1)] * 3, 20, seed=7)
        # dF has the component cos(x3); the worst sample is order one.
        assert closedness_residual(f, pts) > 0.5


class TestMaxwellTheoremReport:
    PTS4 = sample_box([(-1.5, 1.5)] * 4, 30, seed=9)

    def test_minkowski_positive_example(self):
        # F = sin(t) dt^dx2 - cos(t) dt^dx3 has current (0, cos t, sin t, 0):
        # closed, potential -J, unit norm, and J rides its own Lorentz force.
        f = TwoForm.of(4, [(0, 1, "sin(x1)"), (0, 2, "-cos(x1)")])
        report = maxwell_theorem_check(MINKOWSKI4, f, self.PTS4)
        current = maxwell_current(MINKOWSKI4, f)
        x = np.array([0.3, 0.0, 0.0, 0.0])
        assert current.values(x) == pytest.approx(
            [0.0, math.cos(0.3), math.sin(0.3), 0.0]
        )
        assert report.hypotheses_pass
        assert report.closed_pass and report.potential_pass
        assert report.norm_constant_pass and report.lorentz_candidate_pass
        assert report.current_norm_mean == pytest.approx(1.0)
        assert not report.implication_violated
        assert report.divergence_residual < 1e-10

    def test_open_form_report_declines_assertion(self):
        f = TwoForm.of(3, [(0, 1, "sin(x3)")])
        pts = sample_box([(-1.5, 1.5)] * 3, 30, seed=9)
        report = maxwell_theorem_check(FLAT3, f, pts)
        assert not report.closed_pass
        assert not report.potential_pass
        assert not report.hypotheses_pass
        # The current of this form vanishes identically.
        assert report.current_norm_mean == 0.0
        assert report.norm_constant_pass and report.lorentz_candidate_pass
        assert not report.implication_violated
        assert report.divergence_residual == 0.0

    def test_report_dict_is_json_ready(self):
        import json

        f = TwoForm.of(3, [(0, 1, "x1")])
        pts = sample_box([(-1, 1)] * 3, 10, seed=11)
        report = maxwell_theorem_check(FLAT3, f, pts)
        encoded = json.dumps(report.as_dict(), sort_keys=True)
        assert "closedness_residual" in encoded

    def test_intermediate_residual_nonzero_when_norm_varies(self):
        # F_12 = x2 gives current (0, 0, ...)? Use F_12 = x2 on flat R^2:
        # J = (1, 0) scaled by -d2 F... build and confirm the report stays
        # internally consistent on a case with varying |J|^2.
        f = TwoForm.of(3, [(0, 1, "x2^2")])
        pts = sample_box([(0.5, 1.5)] * 3, 30, seed=13)
        report = maxwell_theorem_check(FLAT3, f, pts)
        assert not report.implication_violated


class TestIntermediateLorentzConsistency:
    def test_positive_example_candidate_residual_zero(self):
        f = TwoForm.of(4, [(0, 1, "sin(x1)"), (0, 2, "-cos(x1)")])
        current = maxwell_current(MINKOWSKI4, f)
        force = lorentz_force_form(f)
        for x in sample_box([(-1, 1)] * 4, 10, seed=15):
            r = intermediate_residual(MINKOWSKI4, force, current, x)
            assert np.max(np.abs(r)) < 1e-12
