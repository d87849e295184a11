import random
from fractions import Fraction

import pytest

from hlift import (Distribution, InputError, MultiPoly, PolyVectorField,
                   bracket_generating_step, curvature_at, growth_vector_at,
                   lie_bracket, lie_flag, poly_parse)
from hlift.documents import load_distribution
from hlift.models import bundled_model

from _oracle import oeval, oflag_ranks, opoly

F = Fraction


def fields_for_oracle(dist):
    return [[opoly(c.terms) for c in X.components] for X in dist.frame]


class TestLoading:
    def test_heisenberg_coframe_derived(self):
        dist, _ = bundled_model("heisenberg")
        alpha = dist.coframe[0]
        assert alpha.components[0].is_zero()
        assert alpha.components[1] == poly_parse("-x1", dist.coords)
        assert alpha.components[2] == poly_parse("1", dist.coords)

    def test_martinet_coframe_derived(self):
        dist, _ = bundled_model("martinet")
        alpha = dist.coframe[0]
        assert alpha.components[0] == poly_parse("-x2^2", dist.coords)
        assert alpha.components[2] == poly_parse("1", dist.coords)

    def test_non_graphical_frame_rejected(self):
        doc = {"name": "bad", "dim": 3, "rank": 2,
               "coords": ["x1", "x2", "y"],
               "frame": [["2", "0", "0"], ["0", "1", "0"]]}
        with pytest.raises(InputError, match="graphical"):
            load_distribution(doc)

    def test_bad_coframe_pairing_rejected(self):
        doc = {"name": "bad", "dim": 3, "rank": 2,
               "coords": ["x1", "x2", "y"],
               "frame": [["1", "0", "0"], ["0", "1", "x1"]],
               "coframe": [["0", "0", "1"]]}
        with pytest.raises(InputError, match="annihilate"):
            load_distribution(doc)

    def test_coframe_normalization_enforced(self):
        doc = {"name": "bad", "dim": 3, "rank": 2,
               "coords": ["x1", "x2", "y"],
               "frame": [["1", "0", "0"], ["0", "1", "x1"]],
               "coframe": [["0", "-2*x1", "2"]]}
        with pytest.raises(InputError, match="normalized"):
            load_distribution(doc)

    def test_fiber_name_collision_rejected(self):
        doc = {"name": "bad", "dim": 2, "rank": 1,
               "coords": ["x1", "a1"], "frame": [["1", "0"]]}
        with pytest.raises(InputError, match="collides"):
            load_distribution(doc)

    def test_coframe_frame_duality_all_models(self):
        for name in ("heisenberg", "martinet", "engel"):
            dist, _ = bundled_model(name)
            for alpha in dist.coframe:
                for X in dist.frame:
                    assert alpha.pair(X).is_zero()


class TestFlag:
    def test_heisenberg_level2(self):
        dist, _ = bundled_model("heisenberg")
        flag = lie_flag(dist, 2)
        gens = flag.generators(2)
        vertical = poly_parse("1", dist.coords)
        assert any(g.components[2] == vertical
                   and g.components[0].is_zero() and g.components[1].is_zero()
                   for g in gens)

    def test_martinet_levels(self):
        dist, _ = bundled_model("martinet")
        flag = lie_flag(dist, 3)
        lvl2 = flag.generators(2)
        assert any(g.components[2] == poly_parse("-2*x2", dist.coords)
                   for g in lvl2)
        lvl3 = flag.generators(3)
        assert any(g.components[2] == poly_parse("-2", dist.coords)
                   for g in lvl3)
        # zero candidates pruned
        assert all(not g.is_zero() for g in lvl3)

    def test_engel_levels(self):
        dist, _ = bundled_model("engel")
        flag = lie_flag(dist, 3)
        c = dist.coords
        lvl2 = [g for g in flag.generators(2) if g not in flag.generators(1)]
        assert lvl2 == [PolyVectorField((MultiPoly.zero(c), MultiPoly.zero(c),
                                         poly_parse("1", c), poly_parse("x1", c)))]
        lvl3_new = [g for g in flag.generators(3) if g not in flag.generators(2)]
        assert any(g.components[3] == poly_parse("1", c)
                   and all(g.components[i].is_zero() for i in range(3))
                   for g in lvl3_new)

    def test_monotone_generators(self):
        for name in ("heisenberg", "martinet", "engel"):
            dist, _ = bundled_model(name)
            flag = lie_flag(dist, dist.dim)
            for n in range(2, flag.depth + 1):
                assert set(flag.generators(n)) >= set(flag.generators(n - 1))


class TestGrowthVector:
    def test_heisenberg(self):
        dist, _ = bundled_model("heisenberg")
        assert tuple(growth_vector_at(dist, (F(0), F(0), F(0)))) == (2, 3)
        assert tuple(growth_vector_at(dist, (F(1), F(-2), F(3)))) == (2, 3)

    def test_martinet(self):
        dist, _ = bundled_model("martinet")
        assert tuple(growth_vector_at(dist, (F(0), F(0), F(0)))) == (2, 2, 3)
        assert tuple(growth_vector_at(dist, (F(0), F(1), F(0)))) == (2, 3)

    def test_engel(self):
        dist, _ = bundled_model("engel")
        for p in [(F(0),) * 4, (F(1), F(2), F(-1), F(1, 2))]:
            assert tuple(growth_vector_at(dist, p)) == (2, 3, 4)

    def test_against_brute_force_oracle(self):
        rng = random.Random(31)
        for name in ("heisenberg", "martinet", "engel"):
            dist, _ = bundled_model(name)
            frame = fields_for_oracle(dist)
            for _ in range(5):
                p = tuple(F(rng.randint(-2, 2), rng.randint(1, 3))
                          for _ in range(dist.dim))
                expected = oflag_ranks(frame, dist.dim, p, dist.dim)
                assert list(growth_vector_at(dist, p)) == expected

    def test_nondecreasing_and_bounded(self):
        rng = random.Random(37)
        for name in ("heisenberg", "martinet", "engel"):
            dist, _ = bundled_model(name)
            for _ in range(5):
                p = tuple(F(rng.randint(-3, 3)) for _ in range(dist.dim))
                gv = tuple(growth_vector_at(dist, p))
                assert gv[0] == dist.rank
                assert all(a <= b for a, b in zip(gv, gv[1:]))
                assert gv[-1] <= dist.dim

    def test_dimension_mismatch(self):
        dist, _ = bundled_model("heisenberg")
        with pytest.raises(InputError):
            growth_vector_at(dist, (F(0), F(0)))


class TestStep:
    def test_heisenberg_uniform(self):
        dist, _ = bundled_model("heisenberg")
        report = bracket_generating_step(
            dist, [(F(0), F(0), F(0)), (F(1), F(1), F(1))])
        assert report.min_step == report.max_step == 2
        assert report.uniform and report.generated_everywhere

    def test_martinet_nonuniform(self):
        dist, _ = bundled_model("martinet")
        report = bracket_generating_step(
            dist, [(F(0), F(0), F(0)), (F(0), F(1), F(0))])
        assert set(report.steps) == {3, 2}
        assert not report.uniform

    def test_full_rank_trivial(self):
        coords = ("x1", "x2")
        dist = Distribution("plane", coords,
                            [PolyVectorField.coordinate(coords, 0),
                             PolyVectorField.coordinate(coords, 1)], 2)
        report = bracket_generating_step(dist, [(F(0), F(0))])
        assert report.steps == (1,)

    def test_empty_samples_rejected(self):
        dist, _ = bundled_model("heisenberg")
        with pytest.raises(InputError):
            bracket_generating_step(dist, [])


class TestCurvature:
    def test_heisenberg_pairing(self):
        dist, _ = bundled_model("heisenberg")
        value = curvature_at(dist, (F(0), F(0), F(0)), (F(1), F(0)), (F(0), F(1)))
        assert value == (F(1),)

    def test_martinet_vanishes_on_locus(self):
        dist, _ = bundled_model("martinet")
        assert curvature_at(dist, (F(0), F(0), F(0)),
                            (F(1), F(0)), (F(0), F(1))) == (F(0),)
        assert curvature_at(dist, (F(0), F(1), F(0)),
                            (F(1), F(0)), (F(0), F(1))) == (F(-2),)

    def test_antisymmetry_in_arguments(self):
        dist, _ = bundled_model("engel")
        v = (F(1), F(2))
        assert curvature_at(dist, (F(1),) * 4, v, v) == (F(0), F(0))

    def test_dimension_mismatch(self):
        dist, _ = bundled_model("heisenberg")
        with pytest.raises(InputError):
            curvature_at(dist, (F(0), F(0), F(0)), (F(1),), (F(0), F(1)))
        with pytest.raises(InputError):
            curvature_at(dist, (F(0), F(0)), (F(1), F(0)), (F(0), F(1)))

    def test_extension_independence(self):
        # alpha([V, W]) at q is unchanged by V -> V + g*W with g(q) = 0.
        rng = random.Random(41)
        dist, _ = bundled_model("martinet")
        q = (F(0), F(0), F(0))
        X1, X2 = dist.frame
        alpha = dist.coframe[0]
        base = alpha.pair(lie_bracket(X1, X2)).eval(q)
        for _ in range(10):
            g = MultiPoly(dist.coords,
                          {(1, 0, 0): F(rng.randint(-3, 3)),
                           (0, 1, 0): F(rng.randint(-3, 3)),
                           (1, 1, 0): F(rng.randint(-3, 3))})
            assert g.eval(q) == 0
            modified = X1 + g * X2
            assert alpha.pair(lie_bracket(modified, X2)).eval(q) == base
