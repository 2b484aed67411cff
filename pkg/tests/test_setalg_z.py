from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarseprox.setalg_z import EMPTY, INTEGERS, EPSet, ep_boolean, ep_from_json, ep_membership, ep_normalize

from strategies import ep_sets

WINDOW = range(-60, 61)


def brute(s: EPSet) -> set[int]:
    return {x for x in WINDOW if x in s}


def raw_members(L, pos, neg, T, F):
    def member(x):
        return (x >= T and x % L in pos) or (x <= -T and (-x) % L in neg) or x in F

    return {x for x in WINDOW if member(x)}


class TestNormalize:
    def test_evens_collapse(self):
        # period 4 residues {0,2} with a useless threshold collapse to evens >= 0
        s = ep_normalize(4, {0, 2}, (), 3, {0, 2})
        assert (s.period, s.pos, s.threshold) == (2, frozenset({0}), 0)

    def test_empty_pattern(self):
        assert ep_normalize(3, (), (), 5, ()) == EMPTY

    def test_isolated_exception_kept(self):
        # evens >= 10 plus {4, 8}: 6 is missing, so the pattern only starts at 7
        s = ep_normalize(2, {0}, (), 10, {4, 8})
        assert s.to_json() == {"L": 2, "pos": [0], "neg": [], "T": 7, "F": [4]}

    def test_zero_where_tails_meet(self):
        s = ep_normalize(1, {0}, {0}, 0, ())
        assert s == INTEGERS and 0 in s

    @given(
        st.integers(1, 6).flatmap(
            lambda L: st.tuples(
                st.just(L),
                st.sets(st.integers(0, L - 1)),
                st.sets(st.integers(0, L - 1)),
                st.integers(0, 9).flatmap(lambda T: st.tuples(st.just(T), st.sets(st.integers(-T + 1, T - 1)) if T else st.just(set()))),
            )
        )
    )
    def test_preserves_membership(self, data):
        L, pos, neg, (T, F) = data
        assert brute(ep_normalize(L, pos, neg, T, F)) == raw_members(L, pos, neg, T, F)

    @given(ep_sets())
    def test_canonical_is_structural(self, s):
        # a differently padded description normalizes to the same object
        wider = ep_normalize(s.period * 2, {r + k * s.period for r in s.pos for k in (0, 1)},
                             {r + k * s.period for r in s.neg for k in (0, 1)}, s.threshold + 3,
                             {x for x in range(-s.threshold - 2, s.threshold + 3) if x in s})
        assert wider == s

    def test_bad_residue(self):
        with pytest.raises(ValueError):
            ep_normalize(2, {2}, (), 0, ())


class TestBoolean:
    @given(ep_sets(), ep_sets())
    def test_ops_match_pointwise(self, a, b):
        assert brute(a | b) == brute(a) | brute(b)
        assert brute(a & b) == brute(a) & brute(b)
        assert brute(a - b) == brute(a) - brute(b)
        assert brute(~a) == set(WINDOW) - brute(a)

    @given(ep_sets())
    def test_double_complement(self, a):
        assert ~~a == a

    def test_complement_of_empty(self):
        assert ep_boolean("compl", EMPTY) == INTEGERS

    def test_evens_and_odds(self):
        assert EPSet.tail_ap(0, 2) | EPSet.tail_ap(1, 2) == EPSet.tail_ap(0, 1)

    def test_crt(self):
        assert EPSet.tail_ap(0, 2) & EPSet.tail_ap(0, 3) == EPSet.tail_ap(0, 6)

    def test_unknown_op(self):
        with pytest.raises(ValueError):
            ep_boolean("xor", EMPTY, EMPTY)


class TestDerived:
    @given(ep_sets(), st.integers(-5, 5))
    def test_shift(self, a, k):
        assert {x for x in range(-50, 51) if x in a.shift(k)} == {x + k for x in brute(a) if -50 <= x + k <= 50}

    @given(ep_sets())
    def test_reflect(self, a):
        assert brute(a.reflect()) == {-x for x in brute(a)}

    @given(ep_sets(), st.integers(0, 4))
    def test_dilate(self, a, r):
        want = {x for x in range(-50, 51) if any(abs(x - y) < r for y in brute(a))}
        assert {x for x in range(-50, 51) if x in a.dilate(r)} == want

    def test_dilate_evens(self):
        assert EPSet.residue_class(0, 2).dilate(2) == INTEGERS

    @given(ep_sets())
    def test_atoms_cover_tails(self, a):
        atoms = a.residue_atoms()
        assert all(not t.is_finite and t <= a for t in atoms)
        rest = a
        for t in atoms:
            rest = rest - t
        assert rest.is_finite

    @given(ep_sets())
    def test_json_round_trip(self, a):
        assert ep_from_json(a.to_json()) == a

    def test_membership_helper(self):
        assert ep_membership(EPSet.tail_ap(1, 2), 7)
        assert not ep_membership(EPSet.tail_ap(1, 2), -1)

    @given(ep_sets())
    def test_ends_and_finiteness(self, a):
        far = {x for x in range(40, 61) if x in a}, {x for x in range(-60, -39) if x in a}
        assert a.has_pos_end == bool(far[0])
        assert a.has_neg_end == bool(far[1])
        assert a.is_finite == (not far[0] and not far[1])

    @given(ep_sets())
    def test_some_element(self, a):
        x = a.some_element()
        assert (x is None) == a.is_empty
        if x is not None:
            assert x in a and all(abs(y) >= abs(x) for y in brute(a))
