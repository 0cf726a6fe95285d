"""Exact-angle primitives: parsing, ordering, rotations, folds, bisectors."""

from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from circleform import (
    Direction,
    StructuralError,
    angle_between,
    bisector_points,
    canonical_cycle,
    format_turn,
    gaps_of,
    lex_compare,
    min_rotation,
    mod1,
    parse_turn,
    prefix_sums,
    rotational_fold,
)
from circleform.angles import rotate
from oracles import brute_fold, brute_min_rotation

F = Fraction

turns = st.fractions(min_value=0, max_value=1, max_denominator=60).map(mod1)
gap_seqs = st.lists(
    st.fractions(min_value="1/30", max_value=1, max_denominator=30),
    min_size=1,
    max_size=8,
).map(tuple)


class TestTurnSerialisation:
    def test_round_trip(self):
        for x in (F(0), F(1, 12), F(17, 24), F(5, 7)):
            assert parse_turn(format_turn(x)) == x

    def test_zero_keeps_denominator(self):
        assert format_turn(F(0)) == "0/1"

    def test_integer_text_accepted(self):
        assert parse_turn("0") == 0

    def test_garbage_rejected(self):
        with pytest.raises(StructuralError):
            parse_turn("a/b")
        with pytest.raises(StructuralError):
            parse_turn("1/0")


class TestAngleBetween:
    def test_adjacent_pair(self):
        # 30 degrees between the first two robots of the worked example
        assert angle_between(F(0), F(1, 12), Direction.FORWARD) == F(1, 12)

    def test_same_point_is_zero(self):
        assert angle_between(F(1, 3), F(1, 3), Direction.FORWARD) == 0
        assert angle_between(F(1, 3), F(1, 3), Direction.REVERSE) == 0

    def test_wraps_past_origin(self):
        assert angle_between(F(1, 2), F(1, 4), Direction.FORWARD) == F(3, 4)

    @given(turns, turns)
    def test_directions_complement(self, a, b):
        fwd = angle_between(a, b, Direction.FORWARD)
        rev = angle_between(a, b, Direction.REVERSE)
        assert mod1(fwd + rev) == 0
        assert 0 <= fwd < 1


DEG = F(1, 360)


class TestLexCompare:
    def test_worked_example_readings(self):
        fwd = tuple(k * DEG for k in (30, 90, 60, 75, 105))
        rev = tuple(reversed(fwd))
        assert lex_compare(fwd, rev) == -1
        assert lex_compare(rev, fwd) == 1

    def test_equal(self):
        s = (F(1, 4), F(1, 4), F(1, 2))
        assert lex_compare(s, s) == 0

    def test_second_element_decides(self):
        assert lex_compare((F(1, 4), F(1, 4), F(1, 2)), (F(1, 4), F(1, 2), F(1, 4))) == -1

    def test_length_mismatch(self):
        with pytest.raises(StructuralError):
            lex_compare((F(1, 2),), (F(1, 4), F(1, 4)))

    @given(gap_seqs, gap_seqs)
    def test_antisymmetric(self, s1, s2):
        if len(s1) != len(s2):
            s2 = s1
        assert lex_compare(s1, s2) == -lex_compare(s2, s1)

    @given(gap_seqs, gap_seqs, gap_seqs)
    def test_transitive(self, a, b, c):
        n = min(len(a), len(b), len(c))
        a, b, c = a[:n], b[:n], c[:n]
        if lex_compare(a, b) <= 0 and lex_compare(b, c) <= 0:
            assert lex_compare(a, c) <= 0


class TestMinRotation:
    def test_offset_one(self):
        assert min_rotation((F(1, 2), F(1, 6), F(1, 3))) == ((F(1, 6), F(1, 3), F(1, 2)), 1)

    def test_already_minimal(self):
        s = (F(1, 6), F(1, 3), F(1, 2))
        assert min_rotation(s) == (s, 0)

    def test_all_equal_prefers_offset_zero(self):
        s = (F(1, 4),) * 4
        assert min_rotation(s) == (s, 0)

    @given(gap_seqs)
    def test_matches_brute_force(self, s):
        assert min_rotation(s) == brute_min_rotation(s)

    @given(gap_seqs, st.integers(0, 7))
    def test_invariant_under_pre_rotation(self, s, j):
        assert min_rotation(rotate(s, j))[0] == min_rotation(s)[0]


class TestCanonicalCycle:
    def test_reversal_can_beat_rotation(self):
        # forward rotations of (1,5,2)/8 never reach (1,2,5)/8
        s = (F(1, 8), F(5, 8), F(2, 8))
        assert canonical_cycle(s) == (F(1, 8), F(1, 4), F(5, 8))

    @given(gap_seqs, st.integers(0, 7))
    def test_dihedral_invariance(self, s, j):
        canon = canonical_cycle(s)
        assert canonical_cycle(rotate(s, j)) == canon
        assert canonical_cycle(tuple(reversed(s))) == canon


class TestRotationalFold:
    def test_square(self):
        assert rotational_fold({F(0), F(1, 4), F(1, 2), F(3, 4)}) == 4

    def test_worked_example_is_asymmetric(self):
        assert rotational_fold({F(0), F(1, 12), F(1, 3), F(1, 2), F(17, 24)}) == 1

    def test_half_turn(self):
        assert rotational_fold({F(0), F(1, 6), F(1, 2), F(2, 3)}) == 2

    @given(st.sets(turns, min_size=1, max_size=8))
    def test_matches_brute_force(self, pts):
        assert rotational_fold(pts) == brute_fold(sorted(pts))

    @given(st.sets(turns, min_size=1, max_size=8), turns)
    def test_invariant_under_rotation(self, pts, shift):
        rotated = {mod1(p + shift) for p in pts}
        assert rotational_fold(rotated) == rotational_fold(pts)


class TestBisectorPoints:
    def test_adjacent_pair(self):
        assert bisector_points(F(0), F(1, 12)) == (F(1, 24), F(13, 24))

    def test_antipodal_inputs(self):
        assert bisector_points(F(0), F(1, 2)) == (F(1, 4), F(3, 4))

    def test_wrapping_pair(self):
        assert bisector_points(F(1, 3), F(17, 24)) == (F(25, 48), F(1, 48))

    @given(turns, turns)
    def test_antipodal_and_equidistant(self, a, b):
        assume(a != b)
        p, q = bisector_points(a, b)
        assert mod1(p - q) == F(1, 2)
        assert angle_between(a, p, Direction.FORWARD) == angle_between(p, b, Direction.FORWARD)


class TestGapHelpers:
    def test_gaps_of_single_robot(self):
        assert gaps_of((F(1, 3),)) == (F(1),)

    def test_gaps_close_the_turn(self):
        pts = (F(0), F(1, 12), F(1, 3), F(1, 2), F(17, 24))
        gaps = gaps_of(pts)
        assert gaps == tuple(k * DEG for k in (30, 90, 60, 75, 105))
        assert sum(gaps) == 1

    def test_prefix_sums_start_at_zero(self):
        assert prefix_sums((F(1, 6), F(1, 3), F(1, 2))) == (F(0), F(1, 6), F(1, 2))
