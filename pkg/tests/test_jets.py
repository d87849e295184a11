import random
from fractions import Fraction

import pytest

from hlift import (CovectorPoint, CurveJet, InputError, PolyOneForm,
                   PreconditionError, StratumSpec, TaylorSeries,
                   ehresmann_jet_lift, inadmissible_codim_bound,
                   is_characteristic_jet, is_horizontal_jet, jet_project,
                   poly_parse, pullback_oneform_by_jet, rho_act,
                   tangency_family_dimension)
from hlift.jets import submanifold_family_dimension
from hlift.models import bundled_model

F = Fraction


def fr_rows(rows):
    return tuple(tuple(F(x) for x in row) for row in rows)


def control_jet(rows, base=None):
    rows = fr_rows(rows)
    l = len(rows[0])
    base = tuple(F(b) for b in base) if base else (F(0),) * l
    return CurveJet("controls", len(rows), base, rows)


def random_control_jet(rng, l, r):
    base = tuple(F(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(l))
    rows = tuple(tuple(F(rng.randint(-3, 3), rng.randint(1, 3))
                       for _ in range(l)) for _ in range(r))
    return CurveJet("controls", r, base, rows)


class TestRho:
    def test_scaling(self):
        jet = CurveJet("M", 2, (F(1), F(0)), ((F(1), F(2)), (F(3), F(4))))
        scaled = rho_act(F(2), jet)
        assert scaled.taylor == ((F(2), F(4)), (F(12), F(16)))
        assert scaled.base == jet.base

    def test_identity_and_fixed_point(self):
        jet = CurveJet("M", 3, (F(5),), ((F(0),), (F(0),), (F(0),)))
        assert rho_act(F(1), jet) == jet
        assert rho_act(F(7), jet) == jet  # constant jets are fixed

    def test_zero_rejected(self):
        jet = CurveJet("M", 1, (F(0),), ((F(1),),))
        with pytest.raises(PreconditionError):
            rho_act(0, jet)

    def test_group_property(self):
        rng = random.Random(61)
        jet = random_control_jet(rng, 2, 4)
        a, b = F(2), F(-1, 3)
        assert rho_act(a, rho_act(b, jet)) == rho_act(a * b, jet)


class TestPullback:
    def test_horizontal_heisenberg_curve(self):
        omega = PolyOneForm(tuple(poly_parse(s, ("x1", "x2", "y"))
                                  for s in ("0", "-x1", "1")))
        jet = CurveJet("M", 2, (F(0),) * 3,
                       ((F(1), F(1), F(0)), (F(0), F(0), F(1, 2))))
        assert pullback_oneform_by_jet(omega, jet).is_zero()

    def test_nonhorizontal_residual(self):
        omega = PolyOneForm(tuple(poly_parse(s, ("x1", "x2", "y"))
                                  for s in ("0", "-x1", "1")))
        jet = CurveJet("M", 2, (F(0),) * 3,
                       ((F(1), F(1), F(0)), (F(0), F(0), F(0))))
        series = pullback_oneform_by_jet(omega, jet)
        assert series == TaylorSeries(1, (F(0), F(-1)))

    def test_constant_jet_zero(self):
        omega = PolyOneForm(tuple(poly_parse(s, ("x1", "x2", "y"))
                                  for s in ("x2", "x1*y", "1")))
        jet = CurveJet("M", 3, (F(1), F(2), F(3)), ((F(0),) * 3,) * 3)
        assert pullback_oneform_by_jet(omega, jet).is_zero()

    def test_order_zero_rejected(self):
        omega = PolyOneForm((poly_parse("1", ("x",)),))
        with pytest.raises(InputError):
            pullback_oneform_by_jet(omega, CurveJet("M", 0, (F(0),), ()))


class TestHorizontalJet:
    def test_heisenberg_examples(self):
        dist, _ = bundled_model("heisenberg")
        good = CurveJet("M", 2, (F(0),) * 3,
                        ((F(1), F(1), F(0)), (F(0), F(0), F(1, 2))))
        assert is_horizontal_jet(dist, good).horizontal
        bad = CurveJet("M", 2, (F(0),) * 3,
                       ((F(1), F(1), F(0)), (F(0), F(0), F(0))))
        check = is_horizontal_jet(dist, bad)
        assert not check.horizontal
        assert check.residuals[0] == TaylorSeries(1, (F(0), F(-1)))

    def test_constant_jet_horizontal(self):
        for name in ("heisenberg", "martinet", "engel"):
            dist, _ = bundled_model(name)
            jet = CurveJet("M", 2, (F(1),) * dist.dim, ((F(0),) * dist.dim,) * 2)
            assert is_horizontal_jet(dist, jet).horizontal


class TestJetLift:
    def test_heisenberg_quadratic(self):
        dist, _ = bundled_model("heisenberg")
        lifted = ehresmann_jet_lift(dist, control_jet([[1, 1], [0, 0]]), (F(0),))
        assert [row[2] for row in lifted.taylor] == [F(0), F(1, 2)]

    def test_martinet_cubic(self):
        dist, _ = bundled_model("martinet")
        lifted = ehresmann_jet_lift(
            dist, control_jet([[1, 1], [0, 0], [0, 0]]), (F(0),))
        assert [row[2] for row in lifted.taylor] == [F(0), F(0), F(1, 3)]

    def test_zero_control_constant_jet(self):
        dist, _ = bundled_model("engel")
        lifted = ehresmann_jet_lift(
            dist, control_jet([[0, 0], [0, 0]], base=[1, 2]), (F(3), F(4)))
        assert lifted.base == (F(1), F(2), F(3), F(4))
        assert lifted.is_constant()

    def test_lift_is_horizontal_and_projects_back(self):
        rng = random.Random(67)
        for name in ("heisenberg", "martinet", "engel"):
            dist, _ = bundled_model(name)
            for _ in range(10):
                r = rng.randint(1, 8)
                sigma = random_control_jet(rng, dist.rank, r)
                vb = tuple(F(rng.randint(-2, 2)) for _ in range(dist.corank))
                lifted = ehresmann_jet_lift(dist, sigma, vb)
                assert is_horizontal_jet(dist, lifted).horizontal
                assert jet_project(dist, lifted) == sigma

    def test_rho_equivariance(self):
        rng = random.Random(71)
        for name in ("heisenberg", "martinet", "engel"):
            dist, _ = bundled_model(name)
            for _ in range(5):
                sigma = random_control_jet(rng, dist.rank, rng.randint(1, 6))
                vb = tuple(F(rng.randint(-1, 1)) for _ in range(dist.corank))
                for a in (F(2), F(-1), F(1, 3)):
                    lhs = ehresmann_jet_lift(dist, rho_act(a, sigma), vb)
                    rhs = rho_act(a, ehresmann_jet_lift(dist, sigma, vb))
                    assert lhs == rhs


class TestCharacteristicJet:
    def test_martinet_abnormal_line(self):
        dist, _ = bundled_model("martinet")
        jet = CurveJet("Z1", 4, (F(0), F(0), F(0), F(1)),
                       ((F(1), F(0), F(0), F(0)),) + ((F(0),) * 4,) * 3)
        check = is_characteristic_jet(dist, jet)
        assert check.characteristic
        assert check.projection_horizontal
        assert not check.constant

    def test_heisenberg_line_not_characteristic(self):
        dist, _ = bundled_model("heisenberg")
        jet = CurveJet("Z1", 1, (F(0), F(0), F(0), F(1)),
                       ((F(1), F(0), F(0), F(0)),))
        assert not is_characteristic_jet(dist, jet).characteristic

    def test_constant_jet_flagged(self):
        dist, _ = bundled_model("martinet")
        jet = CurveJet("Z1", 2, (F(0), F(0), F(0), F(1)), ((F(0),) * 4,) * 2)
        check = is_characteristic_jet(dist, jet)
        assert check.characteristic and check.constant

    def test_zero_section_rejected(self):
        dist, _ = bundled_model("martinet")
        jet = CurveJet("Z1", 1, (F(0), F(0), F(0), F(0)),
                       ((F(1), F(0), F(0), F(0)),))
        with pytest.raises(PreconditionError):
            is_characteristic_jet(dist, jet)

    def test_characteristic_implies_horizontal_projection(self):
        # jets of abnormal-line lifts with varying fiber and order all
        # project to horizontal jets
        dist, _ = bundled_model("martinet")
        for a in (F(1), F(-2), F(1, 3)):
            for r in range(1, 6):
                jet = CurveJet("Z1", r, (F(0), F(0), F(0), a),
                               ((F(1), F(0), F(0), F(0)),)
                               + ((F(0),) * 4,) * (r - 1))
                check = is_characteristic_jet(dist, jet)
                assert check.characteristic
                assert check.projection_horizontal


class TestDimensionAudits:
    def test_martinet_stratum_r5(self):
        dist, strata = bundled_model("martinet")
        audit = tangency_family_dimension(dist, strata["martinet-x2zero"], 5)
        assert audit.kernel_rank == 1
        assert audit.stratum_dim == 3
        assert audit.family_dim == 8
        assert audit.codim == 5

    def test_heisenberg_open_stratum(self):
        dist, strata = bundled_model("heisenberg")
        audit = tangency_family_dimension(dist, strata["heisenberg-z1"], 5)
        assert audit.kernel_rank == 0
        assert audit.family_dim == audit.stratum_dim == 4

    def test_engel_z2(self):
        dist, strata = bundled_model("engel")
        audit = tangency_family_dimension(dist, strata["engel-z2"], 8)
        assert audit.kernel_rank == 1
        assert audit.stratum_dim == 5
        assert audit.codim == (2 * 8 + 4) - (8 + 5)

    def test_submanifold_stratum(self):
        dist, strata = bundled_model("martinet")
        audit = submanifold_family_dimension(
            dist, strata["martinet-x2zero-base"], 5)
        assert audit.kernel_rank == 1
        assert audit.stratum_dim == 2
        assert audit.codim == (2 * 5 + 3) - (5 + 2)

    def test_bound_assembly(self):
        dist, strata = bundled_model("martinet")
        audit = inadmissible_codim_bound(dist, 10, list(strata.values()))
        assert audit.dim_horizontal == 23
        assert audit.tangency_dimension_bound == (2 - 1) * (10 - 1) + 6
        assert audit.codim_lower_bound == 3
        assert audit.bound_informative
        tangency = next(s for s in audit.strata if s.kind == "tangency")
        assert tangency.codim == 10
        assert tangency.codim >= audit.codim_lower_bound

    def test_vacuous_bound_at_r1(self):
        dist, _ = bundled_model("martinet")
        audit = inadmissible_codim_bound(dist, 1)
        assert audit.codim_lower_bound == -2 * dist.dim
        assert not audit.bound_informative

    def test_engel_dimension_formula(self):
        dist, _ = bundled_model("engel")
        audit = inadmissible_codim_bound(dist, 8)
        assert audit.dim_horizontal == 2 * 8 + 4

    def test_nonconstant_kernel_rank_rejected(self):
        # the whole punctured annihilator of Martinet mixes ranks 0 and 2
        dist, _ = bundled_model("martinet")
        vars = dist.coords + ("a1",)
        mixed = StratumSpec(
            "mixed", "Z1", 1, inequations=(poly_parse("a1", vars),),
            coframe_selection=(0,),
            samples=(CovectorPoint((F(0), F(0), F(0)), (F(1),)),
                     CovectorPoint((F(0), F(1), F(0)), (F(1),))))
        with pytest.raises(PreconditionError, match="not constant"):
            tangency_family_dimension(dist, mixed, 4)

    def test_monotone_codimension(self):
        for name in ("heisenberg", "martinet", "engel"):
            dist, strata = bundled_model(name)
            audits = [inadmissible_codim_bound(dist, r, list(strata.values()))
                      for r in range(1, 13)]
            l = dist.rank
            for prev, cur in zip(audits, audits[1:]):
                for s_prev, s_cur in zip(prev.strata, cur.strata):
                    assert s_cur.codim - s_prev.codim == l - s_prev.kernel_rank
                    assert l - s_prev.kernel_rank >= 1
