import math
from fractions import Fraction

import numpy as np
import pytest

from hlift import (ClassifyOptions, ControlCurve, CurveJet, InputError,
                   NumericalError, PreconditionError, classify_curve,
                   deform_fixed_endpoints, ehresmann_jet_lift, endpoint,
                   lift_curve, reduced_endpoint, variational_endpoint_family,
                   variational_jacobian)
from hlift.endpoint import bump_directions
from hlift.models import bundled_model

from _oracle import bump_integral

F = Fraction


def poly_control(*rows):
    return ControlCurve("polynomial", polys=list(rows))


LINE = poly_control([0, 1], [0])          # (t, 0)
DIAG = poly_control([0, 1], [0, 1])       # (t, t)
ZERO2 = poly_control([0], [0])


class TestLift:
    def test_heisenberg_quadratic_area(self):
        dist, _ = bundled_model("heisenberg")
        path = lift_curve(dist, DIAG, (0, 0, 0))
        assert np.allclose(endpoint(path), (1, 1, 0.5), atol=1e-9)
        assert path.max_residual < 1e-8

    def test_martinet_cubic(self):
        dist, _ = bundled_model("martinet")
        path = lift_curve(dist, DIAG, (0, 0, 0))
        assert abs(endpoint(path)[2] - 1 / 3) < 1e-9

    def test_zero_control_constant_path(self):
        dist, _ = bundled_model("heisenberg")
        path = lift_curve(dist, ZERO2, (0, 0, 5))
        assert np.allclose(path.states, np.array([[0, 0, 5.0]]
                                                 * len(path.times)))

    def test_basepoint_mismatch(self):
        dist, _ = bundled_model("heisenberg")
        with pytest.raises(PreconditionError):
            lift_curve(dist, DIAG, (1, 0, 0))

    def test_step_underflow(self):
        dist, _ = bundled_model("heisenberg")
        with pytest.raises(NumericalError):
            lift_curve(dist, DIAG, (0, 0, 0), h=1e-13)

    def test_reversal_consistency(self):
        # lifting the time-reversed control from the endpoint returns home
        dist, _ = bundled_model("martinet")
        path = lift_curve(dist, DIAG, (0, 0, 0))
        end = endpoint(path)
        # reversed control (1 - t, 1 - t)
        reverse = poly_control([1, -1], [1, -1])
        back = lift_curve(dist, reverse, end)
        assert np.allclose(endpoint(back), (0, 0, 0), atol=1e-8)

    def test_sampled_control_matches_polynomial(self):
        dist, _ = bundled_model("heisenberg")
        times = np.linspace(0, 1, 41)
        values = [list(times), list(times)]
        sampled = ControlCurve("sampled", times=times, values=values)
        path = lift_curve(dist, sampled, (0, 0, 0))
        assert np.allclose(endpoint(path), (1, 1, 0.5), atol=1e-6)

    def test_reduced_endpoint(self):
        dist, _ = bundled_model("heisenberg")
        assert abs(reduced_endpoint(dist, lift_curve(dist, DIAG, (0, 0, 0)))[0]
                   - 0.5) < 1e-9
        path = lift_curve(dist, ZERO2, (0, 0, 7))
        assert reduced_endpoint(dist, path) == (7.0,)
        mart, _ = bundled_model("martinet")
        assert abs(reduced_endpoint(mart, lift_curve(mart, LINE, (0, 0, 0)))[0]
                   ) < 1e-12


class TestJacobian:
    def test_martinet_line_all_zero(self):
        dist, _ = bundled_model("martinet")
        J = variational_jacobian(dist, LINE, (0, 0, 0), N=12)
        assert np.max(np.abs(J)) < 1e-8

    def test_heisenberg_line_nonzero(self):
        dist, _ = bundled_model("heisenberg")
        J = variational_jacobian(dist, LINE, (0, 0, 0), N=6)
        assert np.max(np.abs(J)) > 1e-3

    def test_heisenberg_column_against_quadrature(self):
        # For the (t, 0) line, d(endpoint) along a channel-2 bump is
        # -int bump dt; check against an independent quadrature.
        dist, _ = bundled_model("heisenberg")
        J = variational_jacobian(dist, LINE, (0, 0, 0), N=6)
        directions = bump_directions(2, 6)
        for col, (channel, mode) in enumerate(directions):
            if channel == 1:
                expected = -bump_integral(mode)
                assert abs(J[0, col] - expected) < 1e-6

    def test_zero_fd_step_rejected(self):
        dist, _ = bundled_model("heisenberg")
        with pytest.raises(InputError):
            variational_jacobian(dist, LINE, (0, 0, 0), N=6, h_fd=0.0)

    def test_too_few_directions_rejected(self):
        dist, _ = bundled_model("engel")
        with pytest.raises(InputError):
            variational_jacobian(dist, poly_control([0], [0, 1]),
                                 (0, 0, 0, 0), N=1)


class TestClassify:
    def test_known_verdicts(self):
        mart, _ = bundled_model("martinet")
        heis, _ = bundled_model("heisenberg")
        engel, _ = bundled_model("engel")
        assert classify_curve(mart, LINE, (0, 0, 0)).verdict == "singular"
        assert classify_curve(heis, LINE, (0, 0, 0)).verdict == "regular"
        assert classify_curve(mart, DIAG, (0, 0, 0)).verdict == "regular"
        engel_abnormal = poly_control([0], [0, 1])
        assert classify_curve(engel, engel_abnormal,
                              (0, 0, 0, 0)).verdict == "singular"

    def test_singular_reconfirmed_with_doubled_directions(self):
        mart, _ = bundled_model("martinet")
        report = classify_curve(mart, LINE, (0, 0, 0),
                                ClassifyOptions(directions=6))
        assert report.verdict == "singular"
        assert report.directions_used == 12

    def test_stability_under_refinement(self):
        mart, _ = bundled_model("martinet")
        heis, _ = bundled_model("heisenberg")
        for dist, curve, base in ((mart, LINE, (0, 0, 0)),
                                  (heis, LINE, (0, 0, 0)),
                                  (mart, DIAG, (0, 0, 0))):
            v0 = classify_curve(dist, curve, base).verdict
            v1 = classify_curve(dist, curve, base,
                                ClassifyOptions(directions=12)).verdict
            v2 = classify_curve(dist, curve, base,
                                ClassifyOptions(h_fd=5e-6)).verdict
            assert v0 == v1 == v2

    def test_report_contents(self):
        mart, _ = bundled_model("martinet")
        report = classify_curve(mart, DIAG, (0, 0, 0))
        assert report.jacobian.shape[0] == 1
        assert len(report.singular_values) == 1
        assert set(report.tol_used) == {"tol", "tol_low", "tol_abs", "h_fd"}

    def test_sampled_curve_classification(self):
        # sampled controls run through the spline path with bump
        # perturbations on top; verdicts must match the polynomial ones
        mart, _ = bundled_model("martinet")
        times = list(np.linspace(0, 1, 33))
        sampled_line = ControlCurve("sampled", times=times,
                                    values=[times, [0.0] * len(times)])
        assert classify_curve(mart, sampled_line, (0, 0, 0)).verdict == "singular"
        sampled_diag = ControlCurve("sampled", times=times,
                                    values=[times, times])
        assert classify_curve(mart, sampled_diag, (0, 0, 0)).verdict == "regular"

    def test_inconclusive_band(self):
        # near-threshold curve: (1e-5 t, t) on Engel leaves sigma_2/sigma_1
        # around 5e-6, inside the (tol_low, tol) band
        engel, _ = bundled_model("engel")
        curve = poly_control([0, 1e-5], [0, 1])
        report = classify_curve(engel, curve, (0, 0, 0, 0))
        assert report.verdict == "inconclusive"
        assert report.tol_used["tol"] > report.tol_used["tol_low"]


class TestFamilyAndDeformation:
    def test_heisenberg_family_invertible(self):
        heis, _ = bundled_model("heisenberg")
        fam = variational_endpoint_family(heis, LINE, (0, 0, 0))
        assert fam.jacobian.shape == (1, 1)
        assert abs(fam.jacobian[0, 0]) > 1e-3
        assert fam.condition_number < 10

    def test_martinet_line_rejected(self):
        mart, _ = bundled_model("martinet")
        with pytest.raises(PreconditionError, match="singular"):
            variational_endpoint_family(mart, LINE, (0, 0, 0))

    def test_martinet_diagonal_family(self):
        # first variation along a channel-2 bump is 2 * int t*bump dt
        mart, _ = bundled_model("martinet")
        fam = variational_endpoint_family(mart, DIAG, (0, 0, 0))
        assert abs(fam.jacobian[0, 0]) > 1e-3
        # both channels move the endpoint by +-2 int t*bump dt on (t, t)
        _, mode = fam.directions[0]
        expected = 2.0 * bump_integral(mode, weight=lambda t: t)
        assert abs(abs(fam.jacobian[0, 0]) - expected) < 1e-6

    def test_family_moves_endpoint_linearly(self):
        heis, _ = bundled_model("heisenberg")
        fam = variational_endpoint_family(heis, LINE, (0, 0, 0))
        base = np.array(reduced_endpoint(
            heis, lift_curve(heis, LINE, (0, 0, 0))))
        eps = 1e-4
        moved = np.array(reduced_endpoint(
            heis, lift_curve(heis, fam.control_for([eps]), (0, 0, 0))))
        derivative = (moved - base) / eps
        assert np.allclose(derivative, fam.jacobian[:, 0], atol=1e-3)

    def test_deform_heisenberg_line(self):
        # mode-2 perturbation: zero first-order endpoint move, so the
        # mode-1 correction cannot simply cancel it and the interior moves
        heis, _ = bundled_model("heisenberg")
        paths = deform_fixed_endpoints(heis, LINE, (0, 0, 0),
                                       perturbation=[(1, 2, 0.05)], steps=10)
        assert len(paths) == 10
        base = np.array(endpoint(lift_curve(heis, LINE, (0, 0, 0))))
        for path in paths:
            assert np.max(np.abs(np.array(endpoint(path)) - base)) < 1e-9
            assert path.max_residual < 1e-8
        # the deformation is nontrivial in the interior
        deviation = np.max(np.abs(paths[-1].states[:, 1]))
        assert deviation > 1e-3

    def test_deform_zero_perturbation_identity(self):
        heis, _ = bundled_model("heisenberg")
        paths = deform_fixed_endpoints(heis, LINE, (0, 0, 0),
                                       perturbation=[], steps=3)
        base = lift_curve(heis, LINE, (0, 0, 0))
        for path in paths:
            assert np.allclose(path.states, base.states, atol=1e-12)

    def test_deform_martinet_line_rejected(self):
        mart, _ = bundled_model("martinet")
        with pytest.raises(PreconditionError):
            deform_fixed_endpoints(mart, LINE, (0, 0, 0),
                                   perturbation=[(1, 1, 0.05)], steps=5)

    def test_newton_divergence_reports_last_iterate(self):
        heis, _ = bundled_model("heisenberg")
        with pytest.raises(NumericalError, match="last iterate"):
            deform_fixed_endpoints(heis, LINE, (0, 0, 0),
                                   perturbation=[(1, 2, 0.05)], steps=1,
                                   newton_tol=1e-18, max_newton=0)

    def test_initial_point_fixed(self):
        heis, _ = bundled_model("heisenberg")
        paths = deform_fixed_endpoints(heis, LINE, (0, 0, 0),
                                       perturbation=[(0, 2, 0.1)], steps=4)
        for path in paths:
            assert tuple(path.states[0]) == (0.0, 0.0, 0.0)


class TestFormalNumericConsistency:
    def test_taylor_matches_integrator(self):
        # Lift polynomial controls both formally (order 4 jets) and
        # numerically; compare at t = 0.01.
        cases = {
            "heisenberg": poly_control([0, 1, F(1, 2)], [0, 1, -1]),
            "martinet": poly_control([0, 2, -1], [0, 1, F(1, 3)]),
            "engel": poly_control([0, 1, 1], [0, -1, F(1, 2)]),
        }
        t = 0.01
        for name, control in cases.items():
            dist, _ = bundled_model(name)
            base = (0,) * dist.dim
            path = lift_curve(dist, control, base, h=1e-3)
            numeric = np.array(path.states[10])  # t = 0.01
            rows = [list(row) + [F(0)] * (4 + 1 - len(row))
                    for row in control.polys]
            jet = CurveJet("controls", 4, tuple(r[0] for r in rows),
                           tuple(tuple(r[k] for r in rows)
                                 for k in range(1, 5)))
            lifted = ehresmann_jet_lift(dist, jet, (F(0),) * dist.corank)
            formal = np.array([float(lifted.series(i).eval(F(1, 100)))
                               for i in range(dist.dim)])
            rel = np.linalg.norm(numeric - formal) / np.linalg.norm(formal)
            assert rel < 1e-6
