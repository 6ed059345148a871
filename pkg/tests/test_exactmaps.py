import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import atom_transforms, iets, interval_sets, random_iet
from oracles import atom_disagreement, atom_images, atom_support
from totipotent.errors import GridMismatch, MeasureMismatch, OverlapError, SerializationError
from totipotent.exactmaps import (
    IntervalSet,
    PiecewiseTranslation,
    apply,
    atom_permutation,
    commutator_is_identity,
    compose,
    cost,
    disagreement,
    disjoint_union,
    extend_by_identity,
    extends,
    fix_set,
    from_atom_permutation,
    grid_denominator,
    image,
    invert,
    parse_rat_strict,
    power,
    preimage,
    rat,
    rat_str,
    restrict,
    support,
    transport,
    uniform_distance,
)

ID = PiecewiseTranslation.identity()


def iv(a, b):
    return IntervalSet.interval(F(a), F(b))


class TestRationals:
    def test_rat_accepts_exact_forms(self):
        assert rat("3/6") == F(1, 2)
        assert rat(" -2 ") == -2
        assert rat(F(1, 3)) == F(1, 3)

    @pytest.mark.parametrize("bad", [0.5, True, None])
    def test_rat_rejects_inexact(self, bad):
        with pytest.raises(TypeError):
            rat(bad)

    @pytest.mark.parametrize("bad", ["1/0", "0.5", "a/b", ""])
    def test_rat_rejects_malformed(self, bad):
        with pytest.raises(ValueError):
            rat(bad)

    def test_strict_parse_wants_reduced_fractions(self):
        assert parse_rat_strict("3/4") == F(3, 4)
        for bad in ("2/4", "1", "1/0", 3):
            with pytest.raises(SerializationError):
                parse_rat_strict(bad)

    @given(st.fractions())
    def test_text_round_trip(self, x):
        assert parse_rat_strict(rat_str(x)) == x


class TestIntervalSet:
    def test_normalisation_merges_and_drops_empty(self):
        s = IntervalSet([(F(1, 2), F(3, 4)), (F(0), F(1, 4)), (F(1, 4), F(1, 2)), (F(9, 10), F(9, 10))])
        assert s.intervals == ((F(0), F(3, 4)),)

    def test_membership_is_half_open(self):
        s = iv("1/4", "1/2")
        assert F(1, 4) in s and F(1, 2) not in s

    def test_carve_takes_leftmost_measure(self):
        s = IntervalSet([(F(0), F(1, 4)), (F(1, 2), F(1))])
        taken, rest = s.carve(F(1, 2))
        assert taken == IntervalSet([(F(0), F(1, 4)), (F(1, 2), F(3, 4))])
        assert rest == iv("3/4", "1")
        with pytest.raises(ValueError):
            s.carve(1)

    @given(interval_sets(), interval_sets())
    def test_boolean_algebra(self, a, b):
        assert (a | b).measure + (a & b).measure == a.measure + b.measure
        assert (a - b) | (a & b) == a
        assert (a ^ b) == (a - b) | (b - a)
        assert a.complement().complement() == a
        assert (a - b).isdisjoint(b)

    @given(interval_sets())
    def test_json_round_trip(self, a):
        assert IntervalSet.from_json(a.to_json()) == a

    def test_json_rejects_non_canonical(self):
        with pytest.raises(SerializationError):
            IntervalSet.from_json([["1/2", "3/4"], ["0/1", "1/4"]])
        with pytest.raises(SerializationError):
            IntervalSet.from_json([["0/1", "1/4"], ["1/4", "1/2"]])


class TestMaps:
    def test_apply_and_domain(self):
        t = PiecewiseTranslation.translation(0, F(1, 2), F(1, 2))
        assert apply(t, F(1, 4)) == F(3, 4)
        assert apply(t, F(3, 4)) is None
        assert not t.is_total

    def test_pieces_are_merged(self):
        t = PiecewiseTranslation([(F(0), F(1, 4), F(1, 2)), (F(1, 4), F(1, 2), F(1, 2))])
        assert len(t) == 1

    def test_overlapping_pieces_rejected(self):
        with pytest.raises(ValueError):
            PiecewiseTranslation([(F(0), F(1, 2), F(0)), (F(1, 4), F(3, 4), F(1, 4))])

    def test_disjoint_union_checks_domains_and_ranges(self):
        a = PiecewiseTranslation.translation(0, F(1, 4), F(1, 2))
        with pytest.raises(OverlapError):
            disjoint_union(a, PiecewiseTranslation.translation(F(1, 8), F(1, 4), 0))
        with pytest.raises(OverlapError):
            disjoint_union(a, PiecewiseTranslation.translation(F(1, 4), F(1, 2), F(1, 4)))

    def test_transport_is_greedy_and_measure_checked(self):
        t = transport(IntervalSet([(F(0), F(1, 8)), (F(1, 4), F(3, 8))]), iv("1/2", "3/4"))
        assert t(F(0)) == F(1, 2) and t(F(1, 4)) == F(5, 8)
        with pytest.raises(MeasureMismatch):
            transport(iv(0, "1/4"), iv(0, "1/2"))

    def test_extend_by_identity(self):
        swap = disjoint_union(transport(iv(0, "1/4"), iv("1/4", "1/2")), transport(iv("1/4", "1/2"), iv(0, "1/4")))
        t = extend_by_identity(swap)
        assert t.is_total and power(t, 2) == ID
        with pytest.raises(ValueError):
            extend_by_identity(transport(iv(0, "1/4"), iv("1/4", "1/2")))

    @given(iets(), iets(), iets())
    def test_composition_is_associative(self, a, b, c):
        assert compose(a, compose(b, c)) == compose(compose(a, b), c)

    @given(iets())
    def test_inverse(self, t):
        assert compose(t, invert(t)) == ID == compose(invert(t), t)

    @given(iets(), st.integers(-5, 5), st.integers(-5, 5))
    def test_power_law(self, t, j, k):
        assert compose(power(t, j), power(t, k)) == power(t, j + k)

    @given(iets(), interval_sets())
    def test_image_preimage(self, t, a):
        assert preimage(t, image(t, a)) == a
        assert image(t, a).measure == a.measure
        assert restrict(t, a).domain == a

    @given(iets())
    def test_json_round_trip(self, t):
        assert PiecewiseTranslation.loads(t.dumps()) == t

    def test_json_rejects_bad_pieces(self):
        for bad in (
            {"pieces": [{"src_start": "0/1", "len": "0/1", "dst_start": "0/1"}]},
            {"pieces": [{"src_start": "0/1", "len": "1/2"}]},
            {"pieces": [{"src_start": "0/1", "len": "1/2", "dst_start": "1/2"}, {"src_start": "1/2", "len": "1/2", "dst_start": "0/1"}], "x": 1},
            [],
        ):
            with pytest.raises(SerializationError):
                PiecewiseTranslation.from_json(bad)
        with pytest.raises(SerializationError):
            PiecewiseTranslation.loads("{")


class TestMetric:
    @given(iets(), iets())
    def test_distance_matches_disagreement_set(self, s, t):
        assert uniform_distance(s, t) == disagreement(s, t).measure

    @settings(max_examples=50)
    @given(atom_transforms(), atom_transforms())
    def test_distance_matches_atom_oracle(self, s, t):
        d = grid_denominator(s) * grid_denominator(t)
        assert uniform_distance(s, t) == atom_disagreement(s, t, d)
        assert support(t).measure == atom_support(t, d)

    def test_distance_needs_transforms(self):
        with pytest.raises(ValueError):
            uniform_distance(PiecewiseTranslation.translation(0, F(1, 2), 0), ID)

    def test_fix_set_and_support_are_complementary(self):
        rng = random.Random(1)
        for _ in range(50):
            t, _ = random_iet(rng, 200)
            assert fix_set(t) | support(t) == IntervalSet.full()
            assert fix_set(t).isdisjoint(support(t))

    def test_extends_and_cost(self):
        t = from_atom_permutation([1, 0, 2, 3])
        part = restrict(t, iv(0, "1/4"))
        assert extends(t, part)
        assert not extends(ID, part)
        assert cost([part, t]) == F(5, 4)

    def test_commutation(self):
        a = from_atom_permutation([1, 0, 2, 3])
        b = from_atom_permutation([0, 1, 3, 2])
        c = from_atom_permutation([0, 2, 1, 3])
        assert commutator_is_identity(a, b)
        assert not commutator_is_identity(a, c)


class TestGrids:
    @given(atom_transforms())
    def test_atom_permutation_round_trip(self, t):
        d = grid_denominator(t)
        assert from_atom_permutation(atom_permutation(t, d)) == t

    def test_atom_permutation_matches_evaluation(self):
        rng = random.Random(2)
        for _ in range(30):
            t, d = random_iet(rng, 64)
            assert list(atom_permutation(t, d)) == atom_images(t, d)

    def test_grid_mismatch(self):
        with pytest.raises(GridMismatch):
            atom_permutation(from_atom_permutation([1, 2, 0]), 4)
