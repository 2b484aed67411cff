from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarseprox import setalg_q as q
from coarseprox.backends import (
    EntourageMismatch,
    GeneratorSet,
    HalfLine,
    Metric,
    PairPredicate,
    QHalfLine,
    SetClassError,
    UnknownAtWindow,
    Windowed,
    ZMetric,
    connectivity_check,
    entourage_ops,
    get_backend,
)
from coarseprox.setalg_q import QSet
from coarseprox.setalg_z import INTEGERS, EPSet

from strategies import ep_sets, q_sets

F = Fraction
EVENS_POS = EPSet.tail_ap(0, 2)
UNIT = QSet.interval(0, 1, True, True)
QPROBES = sorted({F(n, d) for d in range(1, 5) for n in range(0, 12 * d + 1)})


class TestBounded:
    def test_examples(self, zb, qb):
        assert zb.bounded(EPSet.finite([1, 2, 3]))
        assert not zb.bounded(EVENS_POS)
        # on the half-line only finite sets are bounded, so (0,1) is not
        assert not qb.bounded(UNIT)
        assert qb.bounded(QSet.finite([F(1, 2), 7]))

    def test_class_mismatch(self, zb, qb):
        with pytest.raises(SetClassError):
            zb.bounded(UNIT)
        with pytest.raises(SetClassError):
            qb.bounded(EVENS_POS)

    def test_windowed_is_three_valued(self):
        w = Windowed(windows=(50, 200))
        assert w.bounded(GeneratorSet.from_epset(EPSet.finite([3, -4]))) is True
        squares = GeneratorSet.from_sequence(lambda n: n * n, "squares")
        assert w.bounded(squares) == UnknownAtWindow(200)
        assert isinstance(w.bounded(GeneratorSet(lambda x: x > 0, "pos")), UnknownAtWindow)


class TestImage:
    def test_radius_one_is_identity(self, zb):
        for a in (EVENS_POS, EPSet.finite([0, 5]), INTEGERS):
            assert zb.image(Metric(1), a) == a

    def test_evens_thicken_to_integers(self, zb):
        img = zb.image(Metric(2), EPSet.residue_class(0, 2))
        assert img == INTEGERS
        assert all(x in img for x in range(-40, 41))

    def test_halfline_offset_two(self, qb):
        img = qb.image(HalfLine.of(2), UNIT)
        want = UNIT | QSet.interval(2, 3, True, True)
        assert img == want
        assert {x for x in QPROBES if x in img} == {x for x in QPROBES if 0 < x < 1 or 2 < x < 3}

    @given(ep_sets(), st.integers(0, 5))
    def test_z_image_pointwise(self, a, r):
        img = ZMetric().image(Metric(r), a)
        for x in range(-30, 31):
            assert (x in img) == any((x + k) in a for k in range(-r + 1, r))

    @given(q_sets(), st.lists(st.integers(1, 8), max_size=2), st.integers(0, 4))
    def test_q_image_pointwise(self, a, offs, t):
        e = HalfLine.of(*(F(o, 2) for o in offs), threshold=t)
        img = QHalfLine().image(e, a)
        for x in QPROBES[::3]:
            want = x in a or any(
                (x - c >= t and (x - c) in a) or (x >= t and (x + c) in a) for c in e.offsets
            )
            assert (x in img) == want

    def test_entourage_kind_checked(self, zb, qb):
        with pytest.raises(EntourageMismatch):
            zb.image(HalfLine.of(1), EVENS_POS)
        with pytest.raises(EntourageMismatch):
            qb.image(Metric(2), UNIT)

    def test_windowed_image_matches_exact(self):
        w = Windowed()
        a = EPSet.tail_ap(1, 3)
        g = w.image(Metric(3), GeneratorSet.from_epset(a))
        exact = ZMetric().image(Metric(3), a)
        assert np.array_equal(g.mask(-50, 50), GeneratorSet.from_epset(exact).mask(-50, 50))


class TestEntourageOps:
    def test_examples(self):
        assert entourage_ops("compose", Metric(2), Metric(3)) == Metric(5)
        inv = entourage_ops("invert", HalfLine.of(F(1, 2)))
        assert inv.symmetric_offsets() == {F(0), F(1, 2), F(-1, 2)}
        assert entourage_ops("union", HalfLine.of(1), HalfLine.of(F(1, 2))) == HalfLine.of(1, F(1, 2))

    def test_mismatch(self):
        with pytest.raises(EntourageMismatch):
            entourage_ops("union", Metric(1), HalfLine.of(1))
        with pytest.raises(ValueError):
            entourage_ops("compose", Metric(1))

    @given(ep_sets(), st.integers(0, 4), st.integers(0, 4))
    def test_z_compose_contains_iterated_image(self, a, r, s):
        zb = ZMetric()
        comp = entourage_ops("compose", Metric(r), Metric(s))
        assert zb.image(Metric(r), zb.image(Metric(s), a)) <= zb.image(comp, a)

    @given(q_sets(), st.integers(1, 6), st.integers(1, 6), st.integers(0, 3))
    def test_q_compose_contains_iterated_image(self, a, c1, c2, t):
        qb = QHalfLine()
        e, f = HalfLine.of(F(c1, 2), threshold=t), HalfLine.of(F(c2, 3))
        comp = entourage_ops("compose", e, f)
        assert qb.image(e, qb.image(f, a)) <= qb.image(comp, a)

    @given(q_sets(), st.integers(1, 6), st.integers(1, 6))
    def test_q_union_of_images(self, a, c1, c2):
        qb = QHalfLine()
        e, f = HalfLine.of(F(c1, 2)), HalfLine.of(F(c2, 3))
        u = entourage_ops("union", e, f)
        assert qb.image(e, a) | qb.image(f, a) == qb.image(u, a)

    def test_pair_predicate_ops(self):
        near_even = PairPredicate(lambda x, y: (x - y) % 2 == 0, 5, "even gaps")
        inv = entourage_ops("invert", near_even)
        comp = entourage_ops("compose", near_even, near_even)
        assert inv.contains(2, 4) and not inv.contains(2, 3)
        assert comp.contains(0, 6) and not comp.contains(0, 5)


class TestConnectivity:
    def test_examples(self, zb, qb):
        assert zb.covering_entourage(0, 7) == Metric(8)
        e = qb.covering_entourage(F(1, 3), F(5, 2))
        assert e == HalfLine.of(F(13, 6))
        assert e.contains(F(1, 3), F(5, 2))

    def test_seeded_pairs(self, zb, qb):
        import random

        rng = random.Random(7)
        zpairs = [(rng.randint(-500, 500), rng.randint(-500, 500)) for _ in range(100)]
        qpairs = [(F(rng.randint(0, 400), rng.randint(1, 9)), F(rng.randint(0, 400), rng.randint(1, 9))) for _ in range(100)]
        assert connectivity_check(zb, zpairs)
        assert connectivity_check(qb, qpairs)


class TestGeneratorSet:
    @given(ep_sets())
    def test_mask_matches_membership(self, a):
        g = GeneratorSet.from_epset(a)
        xs = range(-40, 41)
        assert list(g.mask(-40, 40)) == [x in a for x in xs]

    def test_enumeration_order(self):
        g = GeneratorSet.from_epset(EPSet.finite([3, -3, 1, 0]))
        assert list(g.enumerate()) == [0, 1, -3, 3]
        odd = GeneratorSet(lambda x: x % 2 == 1, "odd")
        it = odd.enumerate()
        assert [next(it) for _ in range(4)] == [-1, 1, -3, 3]


def test_get_backend():
    assert isinstance(get_backend("z-metric"), ZMetric)
    assert isinstance(get_backend("q-halfline"), QHalfLine)
    assert get_backend("windowed", windows=(10, 20)).windows == (10, 20)
    with pytest.raises(ValueError):
        get_backend("torus")


def test_serialize(zb, qb):
    assert zb.serialize(EVENS_POS) == EVENS_POS.to_json()
    assert qb.serialize(q.NAT) == q.NAT.to_json()
