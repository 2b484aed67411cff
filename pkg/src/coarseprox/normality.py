"""Interpolation witnesses on the integers and non-normality certificates on the half-line."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import setalg_q as q
from .backends import HalfLine, QHalfLine, ZMetric
from .relations import b_rel, prec
from .serial import jsonify
from .setalg_q import QSet, RatCoset, avoid_offset, frac_str, solve_offset, to_frac
from .setalg_z import EPSet

__all__ = [
    "PrecFails",
    "NotNested",
    "NotDisjoint",
    "NormalityWitness",
    "NonNormalityCertificate",
    "interpolate",
    "interpolate_star",
    "split_asymptotic",
    "search_interpolant",
    "q_interpolation_candidates",
    "CANONICAL_A",
    "CANONICAL_B",
    "nonnormality_certificate",
    "validate_certificate",
    "avoid_offset",
]


class PrecFails(ValueError):
    """The precondition ``A prec B`` does not hold."""


class NotNested(ValueError):
    """``A`` is not a subset of ``B``."""


class NotDisjoint(ValueError):
    """The two sets are close at infinity."""


@dataclass
class NormalityWitness:
    C: object
    checks: dict = field(default_factory=dict)

    def revalidate(self, backend, a, b) -> bool:
        return bool(prec(backend, a, self.C).verdict) and bool(prec(backend, self.C, b).verdict)

    def to_json(self) -> dict:
        return {"C": jsonify(self.C), "checks": dict(self.checks)}


def _z_end_halflines(a: EPSet) -> EPSet:
    t = a.threshold
    out = EPSet.finite([])
    if a.has_pos_end:
        out = out | EPSet.tail_ap(t, 1)
    if a.has_neg_end:
        out = out | EPSet.tail_ap(t, 1).reflect()
    return out


def interpolate(backend: ZMetric, a: EPSet, b: EPSet) -> NormalityWitness:
    """``C`` with ``A prec C prec B``: the half-lines through the ends of A."""
    if not isinstance(backend, ZMetric):
        raise TypeError("interpolate works on the z-metric backend")
    if not prec(backend, a, b).verdict:
        raise PrecFails("A prec B fails")
    c = _z_end_halflines(a)
    w = NormalityWitness(c, {"A_prec_C": bool(prec(backend, a, c).verdict), "C_prec_B": bool(prec(backend, c, b).verdict)})
    if not all(w.checks.values()):  # pragma: no cover - would contradict the end analysis
        raise AssertionError(f"interpolant failed revalidation: {w.checks}")
    return w


def interpolate_star(backend: ZMetric, a: EPSet, b: EPSet) -> NormalityWitness:
    """Interpolant nested between the sets: ``A <= C <= B``."""
    if not a <= b:
        raise NotNested("A is not contained in B")
    c0 = interpolate(backend, a, b).C
    d1 = a - c0
    d2 = c0 - b
    c = (c0 | d1) - d2
    w = NormalityWitness(
        c,
        {
            "A_prec_C": bool(prec(backend, a, c).verdict),
            "C_prec_B": bool(prec(backend, c, b).verdict),
            "A_sub_C": a <= c,
            "C_sub_B": c <= b,
            "D1_bounded": backend.bounded(d1),
            "D2_bounded": backend.bounded(d2),
        },
    )
    if not all(w.checks.values()):  # pragma: no cover
        raise AssertionError(f"nested interpolant failed revalidation: {w.checks}")
    return w


def split_asymptotic(backend: ZMetric, a1: EPSet, a2: EPSet) -> tuple[EPSet, EPSet]:
    """``X = X1 | X2`` with A1 far from X1 and A2 far from X2."""
    if b_rel(backend, a1, a2).verdict:
        raise NotDisjoint("the sets share an end")
    x2 = interpolate(backend, a1, ~a2).C
    x1 = ~x2
    if b_rel(backend, a1, x1).verdict or b_rel(backend, a2, x2).verdict:  # pragma: no cover
        raise AssertionError("split failed revalidation")
    return x1, x2


# ---------------------------------------------------------------------------
# half-line


def q_interpolation_candidates() -> list[QSet]:
    """One set for each realizable combination of part features of C and X \\ C.

    Whether ``A prec C`` and ``C prec B`` hold depends only on those
    features, so trying these (plus A and B themselves) decides whether any
    representable interpolant exists.
    """
    nat = q.NAT
    return [
        q.ALL,
        q.ALL - nat,
        QSet.interval(1, None),
        QSet.interval(1, None) - nat,
        q.EMPTY,
        QSet.interval(0, 1, True, True),
        nat,
        QSet.interval(0, 1, True, True) | nat,
    ]


def search_interpolant(backend, a, b):
    """Some ``C`` with ``A prec C prec B``, or None when none exists in the class."""
    if isinstance(backend, ZMetric):
        if not prec(backend, a, b).verdict:
            return None
        return interpolate(backend, a, b).C
    if not isinstance(backend, QHalfLine):
        raise TypeError("search_interpolant needs an exact backend")
    for c in [a, b, *q_interpolation_candidates()]:
        if prec(backend, a, c).verdict and prec(backend, c, b).verdict:
            return c
    return None


CANONICAL_A = QSet.interval(0, 1, True, True)
CANONICAL_B = q.ALL - q.NAT


@dataclass
class NonNormalityCertificate:
    candidate: QSet
    D: QSet
    avoid: list[RatCoset]
    offset: Fraction
    trace: list[Fraction]
    tail_start: Fraction

    def to_json(self) -> dict:
        return {
            "kind": "nonnormality",
            "A": CANONICAL_A.to_json(),
            "B": CANONICAL_B.to_json(),
            "candidate": self.candidate.to_json(),
            "D": self.D.to_json(),
            "avoid": [c.to_json() for c in self.avoid],
            "offset": frac_str(self.offset),
            "trace": [frac_str(x) for x in self.trace],
            "tail_start": frac_str(self.tail_start),
        }

    @classmethod
    def from_json(cls, data: dict) -> NonNormalityCertificate:
        return cls(
            QSet.from_json(data["candidate"]),
            QSet.from_json(data["D"]),
            [RatCoset.from_json(c) for c in data["avoid"]],
            to_frac(data["offset"]),
            [to_frac(x) for x in data["trace"]],
            to_frac(data["tail_start"]),
        )


def _avoid_cosets(d: QSet) -> list[RatCoset]:
    aps = (d | q.NAT).delta.canonical().aps
    return sorted({solve_offset(s, t) for s in aps for t in aps})


def _nat_misses(c: QSet, offset: Fraction) -> QSet:
    return q.NAT - QHalfLine().image(HalfLine.of(offset), c)


def nonnormality_certificate(c: QSet, trace_len: int = 50) -> NonNormalityCertificate:
    """Evidence that ``C prec B`` fails for the canonical ``A = (0,1)``, ``B = Q>=0 \\ N``.

    ``D = X \\ C`` has no interval content, so an offset off the difference
    lattice of ``D | N`` shifts almost all of N into C.
    """
    bk = QHalfLine()
    if not prec(bk, CANONICAL_A, c).verdict:
        raise PrecFails("(0,1) prec C fails")
    d = ~c
    avoid = _avoid_cosets(d)
    off = avoid_offset(avoid)
    misses = _nat_misses(c, off)
    if not misses.is_finite:  # pragma: no cover - excluded by the coset argument
        raise AssertionError("offset leaves infinitely many naturals uncovered")
    tail = max(misses.elements(), default=Fraction(0)) + 1
    hit = QHalfLine().image(HalfLine.of(off), c)
    trace = []
    n = 1
    while len(trace) < trace_len:
        if n in hit:
            trace.append(Fraction(n))
        n += 1
    return NonNormalityCertificate(c, d, avoid, off, trace, tail)


def _pair_related(x: Fraction, y: Fraction, c: Fraction) -> bool:
    return x == y or abs(x - y) == c


def validate_certificate(cert: NonNormalityCertificate | dict, min_trace: int = 50) -> tuple[bool, list[str]]:
    """Replay every claim of the certificate with exact arithmetic."""
    if isinstance(cert, dict):
        try:
            if cert.get("kind") != "nonnormality":
                return False, ["not a nonnormality certificate"]
            cert = NonNormalityCertificate.from_json(cert)
        except (KeyError, TypeError, ValueError) as exc:
            return False, [f"malformed certificate: {exc}"]
    bk = QHalfLine()
    c, off = cert.candidate, cert.offset
    problems = []
    if not prec(bk, CANONICAL_A, c).verdict:
        problems.append("A prec C fails")
    if cert.D != ~c:
        problems.append("D is not the complement of C")
    if cert.D.has_interior:
        problems.append("D has interval content")
    if off <= 0:
        problems.append("offset not positive")
    if sorted(cert.avoid) != _avoid_cosets(~c):
        problems.append("avoidance set does not match D")
    if any(off in s for s in cert.avoid):
        problems.append("offset lies in the avoidance set")
    if len(cert.trace) < min_trace:
        problems.append(f"trace shorter than {min_trace}")
    if any(y <= x for x, y in zip(cert.trace, cert.trace[1:])):
        problems.append("trace not strictly increasing")
    for n in cert.trace:
        if n not in q.NAT:
            problems.append(f"trace point {n} is not a natural number")
            continue
        # pointwise: some member of C within the offset of n
        if not (n in c or (n - off) in c or (n + off >= 0 and (n + off) in c)):
            problems.append(f"trace point {n} not reached from C")
    # periodic part: every natural from tail_start on is reached
    rest = _nat_misses(c, off) & QSet.interval(cert.tail_start, None)
    if not rest.is_empty:
        problems.append("naturals beyond tail_start are missed")
    if prec(bk, c, CANONICAL_B).verdict:
        problems.append("decider claims C prec B")
    return not problems, problems
