from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarseprox import setalg_q as q
from coarseprox.setalg_q import (
    Interval,
    QSet,
    RatAP,
    RatCoset,
    ap_intersect,
    avoid_offset,
    q_membership,
    q_union_all,
    solve_offset,
)

from strategies import discrete_sets, q_sets, rat_aps

F = Fraction
A = QSet.interval(0, 1, True, True)
B = q.ALL - q.NAT

# rationals with denominator <= 12 in [0, 16]; every set drawn by the
# strategies has denominators dividing 12 or below 5
PROBES = sorted({F(n, d) for d in range(1, 13) for n in range(0, 16 * d + 1)})


def members(s: QSet, probes=PROBES) -> set[Fraction]:
    return {x for x in probes if x in s}


def upto(p: RatAP, top: int) -> set[Fraction]:
    out, x = set(), p.anchor
    while x <= top:
        out.add(x)
        x += p.step
    return out


class TestExamples:
    def test_complement_of_naturals(self):
        c = ~q.NAT
        assert c.U == (Interval(F(0), None, False, True),)
        assert c.P == q.NAT.delta
        assert c.Q.is_empty

    def test_unit_interval_misses_naturals(self):
        assert (A & q.NAT).is_empty

    def test_ap_difference(self):
        got = QSet.ap(0, 1) - QSet.ap(0, 2)
        assert got == QSet.ap(1, 2)
        small = [F(n, d) for d in range(1, 5) for n in range(0, 50 * d + 1)]
        assert members(got, small) == {x for x in small if x.denominator == 1 and x % 2 == 1}

    def test_membership(self):
        assert not q_membership(B, 3)
        assert q_membership(B, F(7, 2))
        assert not q_membership(A, 1)
        with pytest.raises(ValueError):
            q_membership(A, -1)

    def test_ap_intersections(self):
        assert ap_intersect(RatAP(F(0), F(2)), RatAP(F(0), F(3))) == RatAP(F(0), F(6))
        assert ap_intersect(RatAP(F(0), F(1)), RatAP(F(1, 2), F(1))) is None

    def test_solve_offset_naturals(self):
        coset = solve_offset(RatAP(F(0), F(1)), RatAP(F(0), F(1)))
        assert coset == RatCoset(F(0), F(1))
        nat = QSet.ap(0, 1)
        for c in (F(0), F(1, 2), F(1), F(3, 2)):
            # (N + c) & N is infinite exactly for integer c
            assert (not (nat.shift(c) & nat).is_finite) == (c in coset)

    def test_avoid_offset_examples(self):
        assert avoid_offset([RatCoset(F(0), F(1))]) == F(1, 2)
        assert avoid_offset([RatCoset(F(0), F(1, 2))]) == F(1, 3)
        cosets = [RatCoset(F(0), F(1)), RatCoset(F(1, 3), F(1, 3))]
        c = avoid_offset(cosets)
        assert c == F(1, 5)
        assert all(c not in s for s in cosets)


class TestApKernel:
    def test_intersect_matches_enumeration(self):
        # every pair of progressions with denominators up to 12, anchors and
        # steps on a small grid, compared with enumeration up to 1000
        dens = (1, 2, 3, 4, 6, 12)
        aps = [RatAP(F(a, d), F(s, d)) for d in dens for a in (0, 1, 5) for s in (1, 2, 3, 7)]
        for p, r in product(aps[::3], aps[1::4]):
            want = upto(p, 1000) & upto(r, 1000)
            got = ap_intersect(p, r)
            have = upto(got, 1000) if got else set()
            assert have == want, (p, r)

    @given(rat_aps(max_den=12), rat_aps(max_den=12))
    def test_intersect_property(self, p, r):
        want = upto(p, 200) & upto(r, 200)
        got = ap_intersect(p, r)
        assert (upto(got, 200) if got else set()) == want

    @given(rat_aps(), rat_aps(), st.integers(0, 24), st.integers(1, 6))
    def test_solve_offset_decides_infinite_meets(self, s, t, n, d):
        c = F(n, d)
        meet = (QSet.ap(s.anchor, s.step).shift(c) & QSet.ap(t.anchor, t.step))
        assert (not meet.is_finite) == (c in solve_offset(s, t))


class TestBoolean:
    @given(q_sets(), q_sets())
    def test_binary_ops_pointwise(self, a, b):
        ma, mb = members(a), members(b)
        assert members(a | b) == ma | mb
        assert members(a & b) == ma & mb
        assert members(a - b) == ma - mb

    @given(q_sets())
    def test_complement_pointwise(self, a):
        assert members(~a) == set(PROBES) - members(a)
        assert ~~a == a

    @given(q_sets(), q_sets(), q_sets())
    def test_laws_hold_structurally(self, a, b, c):
        # canonical forms make the Boolean-algebra laws literal equalities
        assert a | b == b | a
        assert a & (b | c) == (a & b) | (a & c)
        assert ~(a | b) == ~a & ~b
        assert a - b == a & ~b

    @given(st.lists(q_sets(), min_size=1, max_size=5))
    def test_union_all_matches_pairwise(self, sets):
        want = sets[0]
        for s in sets[1:]:
            want = want | s
        assert q_union_all(sets) == want

    @given(discrete_sets(), discrete_sets())
    def test_discrete_ops(self, x, y):
        probes = PROBES
        mx, my = {p for p in probes if p in x}, {p for p in probes if p in y}
        assert {p for p in probes if p in (x | y)} == mx | my
        assert {p for p in probes if p in (x & y)} == mx & my
        assert {p for p in probes if p in (x - y)} == mx - my


class TestStructure:
    @given(q_sets(), st.integers(0, 12), st.integers(1, 4))
    def test_shift(self, a, n, d):
        c = F(n, d)
        up = a.shift(c)
        down = a.shift(-c)
        for x in PROBES[:200]:
            assert (x in up) == (x - c >= 0 and (x - c) in a)
            assert (x in down) == ((x + c) in a)

    @given(q_sets())
    def test_json_round_trip(self, a):
        assert QSet.from_json(a.to_json()) == a

    @given(q_sets())
    def test_feature_flags(self, a):
        # the part features agree with what the set does far out
        far = [F(n, 12) for n in range(12 * 40, 12 * 60)]
        hit = [x for x in far if x in a]
        if a.interval_unbounded:
            assert len(hit) > len(far) // 2
        elif a.discrete_infinite:
            assert 0 < len(hit) < len(far) // 2
        else:
            assert not hit
        assert a.is_finite == (not a.I and a.delta.is_finite)

    def test_some_element_is_member(self):
        for s in (A, B, q.NAT, QSet.finite([F(7, 3)])):
            assert s.some_element() in s
