from __future__ import annotations

import json

import pytest

from coarseprox import setalg_q as q
from coarseprox.backends import GeneratorSet, QHalfLine, ZMetric
from coarseprox.harness import (
    CLAUSES,
    DEFAULT_COUNTS,
    EXPECTED_Q_FAILURES,
    SUITES,
    CheckReport,
    SeedPlan,
    gen_sets,
    load_set,
    pattern_ok,
    replay,
    run_suite,
)
from coarseprox.normality import CANONICAL_A, CANONICAL_B
from coarseprox.setalg_q import QSet
from coarseprox.setalg_z import INTEGERS, EPSet

SMALL = {k: max(4, v // 20) for k, v in DEFAULT_COUNTS.items()}


def small_plan(seed=1) -> SeedPlan:
    return SeedPlan(seed=seed, counts=dict(SMALL))


class TestGeneration:
    def test_injected_integer_sets(self):
        sets = gen_sets(SeedPlan(seed=1, counts={"sets": 5}), EPSet)
        assert EPSet.finite([]) in sets and INTEGERS in sets

    def test_deterministic(self):
        a = gen_sets(SeedPlan(seed=1), EPSet)
        b = gen_sets(SeedPlan(seed=1), EPSet)
        assert a == b
        assert a != gen_sets(SeedPlan(seed=2), EPSet)

    def test_injected_half_line_sets(self):
        sets = gen_sets(SeedPlan(seed=2), QSet)
        assert CANONICAL_A in sets and CANONICAL_B in sets

    def test_generator_sets(self):
        sets = gen_sets(SeedPlan(seed=3, counts={"sets": 6}), GeneratorSet)
        assert len(sets) == 6 and all(isinstance(s, GeneratorSet) for s in sets)


class TestReport:
    def test_order_independent(self):
        entries = [("b.x", False, {"A": EPSet.finite([i])}) for i in range(5)]
        r1, r2 = CheckReport("s", "z-metric", 0), CheckReport("s", "z-metric", 0)
        for e in entries:
            r1.record(*e)
        for e in reversed(entries):
            r2.record(*e)
        assert json.dumps(r1.to_json()) == json.dumps(r2.to_json())

    def test_oracle_failures_are_disagreements(self):
        r = CheckReport("crosscheck", "z-metric", 0)
        r.record("oracle.b", False, {"A": INTEGERS})
        r.record("rule.b", True, {"A": INTEGERS})
        assert len(r.oracle_disagreements) == 1
        assert r.failed_clauses() == {"oracle.b"}


class TestSuites:
    @pytest.mark.parametrize("suite", SUITES)
    def test_z_metric_clean(self, suite):
        r = run_suite(suite, ZMetric(), small_plan())
        assert r.failed_clauses() == set(), r.failures[:2]
        assert r.instances > 0

    def test_every_clause_is_exercised(self):
        plan = small_plan()
        seen = set()
        for bk in (ZMetric(), QHalfLine()):
            for s in SUITES:
                seen |= set(run_suite(s, bk, plan).clauses)
        assert seen == set(CLAUSES)

    def test_half_line_failures(self):
        plan = small_plan()
        reports = [run_suite(s, QHalfLine(), plan) for s in ("proximity", "nbhd")]
        failed = set().union(*(r.failed_clauses() for r in reports))
        assert failed == EXPECTED_Q_FAILURES
        assert pattern_ok(reports)

    def test_pattern_rejects_extra_failures(self):
        r = run_suite("bornology", ZMetric(), small_plan())
        assert pattern_ok([r])
        r.record("bornology.union", False, {"S": INTEGERS, "T": INTEGERS})
        assert not pattern_ok([r])

    def test_pattern_needs_canonical_instance(self):
        r = CheckReport("proximity", "q-halfline", 0)
        r.record("proximity.strong", False, {"A": QSet.interval(2, 3), "B": q.NAT})
        assert not pattern_ok([r])
        r.record("proximity.strong", False, {"A": CANONICAL_A, "B": q.NAT})
        assert pattern_ok([r])


class TestReplay:
    def test_canonical_strong_failure(self):
        r = run_suite("proximity", QHalfLine(), small_plan())
        entry = next(f for f in r.failures if f["instance"] == {"A": CANONICAL_A.to_json(), "B": q.NAT.to_json()})
        entry = json.loads(json.dumps(entry))
        assert replay(QHalfLine(), entry) is False

    def test_passing_clause_replays_true(self):
        entry = {"clause": "proximity.symmetry", "instance": {"A": EPSet.tail_ap(0, 2).to_json(), "B": INTEGERS.to_json()}}
        assert replay(ZMetric(), entry) is True

    def test_load_set(self):
        assert load_set("q-halfline", CANONICAL_B.to_json()) == CANONICAL_B
        with pytest.raises(ValueError):
            load_set("windowed", {})
