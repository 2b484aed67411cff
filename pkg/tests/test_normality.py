from __future__ import annotations

import copy
from fractions import Fraction

import pytest
from hypothesis import given

from coarseprox import setalg_q as q
from coarseprox.backends import QHalfLine, ZMetric
from coarseprox.normality import (
    CANONICAL_A,
    CANONICAL_B,
    NotDisjoint,
    NotNested,
    PrecFails,
    interpolate,
    interpolate_star,
    nonnormality_certificate,
    q_interpolation_candidates,
    search_interpolant,
    split_asymptotic,
    validate_certificate,
)
from coarseprox.relations import b_rel, prec
from coarseprox.setalg_q import QSet, RatCoset
from coarseprox.setalg_z import INTEGERS, EPSet

from strategies import ep_sets

F = Fraction
EVENS_POS = EPSet.tail_ap(0, 2)
ODDS_POS = EPSet.tail_ap(1, 2)
NEG_EVENS = EVENS_POS.reflect()
NONNEG = EPSet.tail_ap(0, 1)


class TestInterpolate:
    def test_half_line_through_the_end(self, zb):
        w = interpolate(zb, EVENS_POS, NONNEG)
        assert w.C == EPSet.tail_ap(EVENS_POS.threshold, 1)
        assert w.checks == {"A_prec_C": True, "C_prec_B": True}
        assert w.revalidate(zb, EVENS_POS, NONNEG)

    def test_finite_gives_empty(self, zb):
        assert interpolate(zb, EPSet.finite([3, -9]), EVENS_POS).C == EPSet.finite([])

    def test_complement_of_negative_evens(self, zb):
        w = interpolate(zb, EVENS_POS, ~NEG_EVENS)
        assert w.C == EPSet.tail_ap(EVENS_POS.threshold, 1)

    def test_precondition(self, zb):
        with pytest.raises(PrecFails):
            interpolate(zb, EVENS_POS, ~ODDS_POS)

    def test_needs_metric_backend(self, qb):
        with pytest.raises(TypeError):
            interpolate(qb, CANONICAL_A, CANONICAL_B)

    @given(ep_sets(), ep_sets())
    def test_interpolant_exists_whenever_prec(self, a, b):
        zb = ZMetric()
        if not prec(zb, a, b).verdict:
            with pytest.raises(PrecFails):
                interpolate(zb, a, b)
            return
        w = interpolate(zb, a, b)
        assert prec(zb, a, w.C).verdict and prec(zb, w.C, b).verdict


class TestInterpolateStar:
    def test_nested(self, zb):
        w = interpolate_star(zb, EVENS_POS, NONNEG)
        assert EVENS_POS <= w.C <= NONNEG
        assert all(w.checks.values())

    def test_empty(self, zb):
        assert interpolate_star(zb, EPSet.finite([]), EVENS_POS).C == EPSet.finite([])

    def test_errors(self, zb):
        evens = EPSet.residue_class(0, 2)
        with pytest.raises(PrecFails):
            # the evens share both ends with their complement
            interpolate_star(zb, evens, evens)
        with pytest.raises(NotNested):
            interpolate_star(zb, NONNEG, EVENS_POS)

    @given(ep_sets(), ep_sets())
    def test_property(self, a, extra):
        zb = ZMetric()
        b = a | extra
        if not prec(zb, a, b).verdict:
            return
        w = interpolate_star(zb, a, b)
        assert a <= w.C <= b
        assert prec(zb, a, w.C).verdict and prec(zb, w.C, b).verdict


class TestSplit:
    def test_opposite_ends(self, zb):
        x1, x2 = split_asymptotic(zb, EVENS_POS, NEG_EVENS)
        assert x1 | x2 == INTEGERS
        assert -1000 in x1 and 1000 in x2
        assert not b_rel(zb, EVENS_POS, x1).verdict and not b_rel(zb, NEG_EVENS, x2).verdict

    def test_finite_pair(self, zb):
        x1, x2 = split_asymptotic(zb, EPSet.finite([1]), EPSet.finite([2]))
        assert (x1, x2) == (INTEGERS, EPSet.finite([]))

    def test_shared_end(self, zb):
        with pytest.raises(NotDisjoint):
            split_asymptotic(zb, EVENS_POS, ODDS_POS)

    @given(ep_sets(), ep_sets())
    def test_property(self, a1, a2):
        zb = ZMetric()
        if b_rel(zb, a1, a2).verdict:
            return
        x1, x2 = split_asymptotic(zb, a1, a2)
        assert x1 | x2 == INTEGERS
        assert not b_rel(zb, a1, x1).verdict and not b_rel(zb, a2, x2).verdict


class TestHalfLineInterpolation:
    def test_canonical_instance_has_no_interpolant(self, qb):
        assert prec(qb, CANONICAL_A, CANONICAL_B).verdict
        assert search_interpolant(qb, CANONICAL_A, CANONICAL_B) is None

    def test_candidates_cover_features(self):
        def feats(s):
            return (s.has_interior, s.interval_unbounded, s.discrete_infinite)

        pairs = {(feats(c), feats(~c)) for c in q_interpolation_candidates()}
        assert len(pairs) == len(q_interpolation_candidates())

    def test_interpolant_found_when_one_exists(self, qb):
        a = CANONICAL_A
        b = q.ALL - QSet.finite([5, F(7, 2)])
        c = search_interpolant(qb, a, b)
        assert c is not None and prec(qb, a, c).verdict and prec(qb, c, b).verdict

    def test_no_interpolant_without_prec(self, qb):
        # the complement of N | (0,1) keeps an unbounded interval, close to N
        assert not prec(qb, q.NAT, q.NAT | CANONICAL_A).verdict
        assert search_interpolant(qb, q.NAT, q.NAT | CANONICAL_A) is None


class TestCertificates:
    @pytest.mark.parametrize(
        "cand, offset",
        [
            (q.ALL - q.NAT, F(1, 2)),
            (q.ALL - QSet.ap(0, F(1, 2)), F(1, 3)),
            (q.ALL, F(1, 2)),
        ],
    )
    def test_examples(self, cand, offset):
        cert = nonnormality_certificate(cand)
        assert cert.offset == offset
        assert len(cert.trace) == 50
        assert all(n in q.NAT for n in cert.trace)
        ok, problems = validate_certificate(cert)
        assert ok, problems

    def test_avoidance_set_for_naturals(self):
        cert = nonnormality_certificate(q.ALL - q.NAT)
        assert cert.D == q.NAT
        assert cert.avoid == [RatCoset(F(0), F(1))]
        assert cert.trace[:3] == [F(1), F(2), F(3)]

    def test_json_round_trip_validates(self):
        cert = nonnormality_certificate(q.ALL - QSet.ap(F(1, 3), F(1, 3)))
        data = cert.to_json()
        assert validate_certificate(data) == (True, [])

    def test_tampering_is_caught(self):
        data = nonnormality_certificate(q.ALL - q.NAT).to_json()
        bad = copy.deepcopy(data)
        bad["offset"] = "1"
        ok, problems = validate_certificate(bad)
        assert not ok and "offset lies in the avoidance set" in problems
        short = copy.deepcopy(data)
        short["trace"] = short["trace"][:10]
        assert not validate_certificate(short)[0]
        assert validate_certificate({"kind": "other"}) == (False, ["not a nonnormality certificate"])
        assert not validate_certificate({"kind": "nonnormality"})[0]

    def test_precondition(self):
        with pytest.raises(PrecFails):
            nonnormality_certificate(q.NAT)

    def test_seeded_candidates(self):
        import random

        from coarseprox.harness import _candidate_c

        rng = random.Random(11)
        qb = QHalfLine()
        for _ in range(15):
            c = _candidate_c(rng, 4)
            assert prec(qb, CANONICAL_A, c).verdict
            assert validate_certificate(nonnormality_certificate(c).to_json())[0]
            assert not prec(qb, c, CANONICAL_B).verdict
