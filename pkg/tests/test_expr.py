from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarseprox import setalg_q as q
from coarseprox.backends import GeneratorSet, QHalfLine, SetClassError, Windowed, ZMetric
from coarseprox.expr import ExprError, Node, elaborate, parse_expr, print_expr
from coarseprox.setalg_q import QSet
from coarseprox.setalg_z import EPSet

F = Fraction

nums = st.builds(F, st.integers(-20, 20), st.integers(1, 6))
atoms = st.one_of(
    st.sampled_from([Node(h) for h in ("empty", "all", "nat", "evens", "odds", "squares", "pow2")]),
    st.lists(nums, max_size=4).map(lambda vs: Node("finite", tuple(sorted(set(vs))))),
    st.tuples(nums, nums).map(lambda t: Node("ap", t)),
    st.tuples(nums, st.one_of(st.none(), nums), st.sampled_from(["open", "closed"]), st.sampled_from(["open", "closed"])).map(
        lambda t: Node("interval", t)
    ),
)


def _comb(children):
    return st.one_of(
        st.lists(children, min_size=1, max_size=3).map(lambda ks: Node("union", (), tuple(ks))),
        st.lists(children, min_size=1, max_size=3).map(lambda ks: Node("inter", (), tuple(ks))),
        children.map(lambda k: Node("compl", (), (k,))),
        children.map(lambda k: Node("neg", (), (k,))),
        st.tuples(children, children).map(lambda ks: Node("diff", (), ks)),
    )


trees = st.recursive(atoms, _comb, max_leaves=8)


class TestParse:
    def test_nested_tree(self):
        n = parse_expr("compl(union(ap(0,2), finite{1}))")
        assert n == Node("compl", (), (Node("union", (), (Node("ap", (F(0), F(2))), Node("finite", (F(1),)))),))

    def test_unit_interval(self):
        n = parse_expr("interval(0,1,open,open)")
        assert elaborate(n, QHalfLine()) == QSet.interval(0, 1, True, True)

    def test_error_position(self):
        with pytest.raises(ExprError) as info:
            parse_expr("ap(0,)")
        assert (info.value.line, info.value.column) == (1, 6)

    @pytest.mark.parametrize(
        "text, line, col",
        [
            ("union(nat,\n  bogus)", 2, 3),
            ("finite{1,2", 1, 11),
            ("nat nat", 1, 5),
            ("interval(0,1,open)", 1, 18),
            ("diff(nat)", 1, 9),
            ("ap(1/0,1)", 1, 4),
            ("ap(1;2)", 1, 5),
        ],
    )
    def test_more_errors(self, text, line, col):
        with pytest.raises(ExprError) as info:
            parse_expr(text)
        assert (info.value.line, info.value.column) == (line, col)

    def test_whitespace_insensitive(self):
        assert parse_expr(" union ( nat ,\tevens ) ") == parse_expr("union(nat,evens)")

    @given(trees)
    def test_print_parse_round_trip(self, tree):
        assert parse_expr(print_expr(tree)) == tree


class TestElaborate:
    def test_integer_sets(self):
        zb = ZMetric()
        assert elaborate("ap(0,2)", zb) == EPSet.tail_ap(0, 2)
        assert elaborate("neg(ap(0,2))", zb) == EPSet.tail_ap(0, 2).reflect()
        assert elaborate("union(evens,odds)", zb) == ~EPSet.finite([])
        assert elaborate("diff(all, finite{0})", zb) == ~EPSet.finite([0])

    def test_half_line_sets(self):
        qb = QHalfLine()
        assert elaborate("compl(nat)", qb) == q.ALL - q.NAT
        assert elaborate("interval(1/2,oo,closed,open)", qb) == QSet.interval(F(1, 2), None)
        assert elaborate("inter(ap(0,1/2), ap(0,1/3))", qb) == QSet.ap(0, 1)

    @pytest.mark.parametrize(
        "text, backend",
        [
            ("interval(0,1,open,open)", ZMetric()),
            ("finite{1/2}", ZMetric()),
            ("neg(nat)", QHalfLine()),
            ("squares", ZMetric()),
            ("finite{-1}", QHalfLine()),
            ("interval(0,1,open,open)", Windowed()),
        ],
    )
    def test_class_mismatch(self, text, backend):
        with pytest.raises(SetClassError):
            elaborate(text, backend)

    def test_windowed_sets(self):
        w = Windowed()
        g = elaborate("union(squares, neg(pow2))", w)
        assert isinstance(g, GeneratorSet)
        want = [x for x in range(-20, 21) if (x >= 0 and round(x**0.5) ** 2 == x) or (x < 0 and (-x & (-x - 1)) == 0)]
        assert [x for x in range(-20, 21) if x in g] == want
        assert list(g.mask(-20, 20)) == [x in g for x in range(-20, 21)]
        assert w.bounded(elaborate("inter(pow2, finite{1,3,8})", w)) is True
        assert w.bounded(elaborate("diff(finite{1,4}, squares)", w)) is True
        assert elaborate("ap(1,3)", w).mask(0, 7).tolist() == [x in EPSet.tail_ap(1, 3) for x in range(8)]
