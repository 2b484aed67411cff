"""Deciders for resemblance, boundedness, ``prec``, ``b`` and neighborhoods.

On the integers everything reduces to ends: two sets are close at infinity
exactly when they share an end.  On the half-line every set splits into
bounded interval content, an unbounded interval (possibly with infinitely
many points removed), and isolated points, and closeness is decided from
which of those parts are present.  Each relation is additionally computed
straight from its defining formula (images, subset pairs, close pairs) so
that the modes can be checked against one another and against the window
oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from math import gcd
from typing import Callable

import numpy as np

from .backends import (
    GeneratorSet,
    HalfLine,
    Metric,
    QHalfLine,
    UnknownAtWindow,
    Verdict,
    Windowed,
    ZMetric,
)
from .serial import jsonify
from .setalg_q import QSet, RatAP, _qlcm, _next_prime_above, avoid_offset, solve_offset
from .setalg_z import EPSet

__all__ = [
    "RelationResult",
    "InconsistentWitness",
    "lambda_rel",
    "asym_bounded",
    "prec",
    "b_rel",
    "nbhd",
    "derive_b_from_nbhd",
    "nbhd_from_b",
    "z_b_rule",
    "z_lambda_rule",
    "q_b_rule",
    "q_cover_rule",
    "q_lambda_rule",
    "cover_offsets",
    "check_witness",
    "PREC_MODES",
    "B_MODES",
]

PREC_MODES = ("image", "disjoint", "pairs")
B_MODES = ("image", "resemblance", "pairs")
_TAGS = {"image": "i", "disjoint": "ii", "resemblance": "ii", "pairs": "iii", "rule": "rule"}


class InconsistentWitness(RuntimeError):
    """A constructive witness failed its own recomputation."""


@dataclass
class RelationResult:
    verdict: Verdict
    witness: dict | None = None
    mode: str = "rule"
    backend: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def tag(self) -> str:
        return _TAGS.get(self.mode, self.mode)

    def __bool__(self) -> bool:
        return self.verdict is True

    def to_json(self) -> dict:
        v = self.verdict
        return {
            "verdict": v if isinstance(v, bool) else jsonify(v),
            "witness": jsonify(self.witness),
            "mode": self.mode,
            "tag": self.tag,
            "backend": self.backend,
        }


def _negate(v: Verdict) -> Verdict:
    return v if isinstance(v, UnknownAtWindow) else not v


# ---------------------------------------------------------------------------
# integers


def z_b_rule(a: EPSet, b: EPSet) -> bool:
    return bool(a.ends & b.ends)


def z_lambda_rule(a: EPSet, b: EPSet) -> bool:
    if a.is_empty or b.is_empty:
        return a.is_empty and b.is_empty
    return a.ends == b.ends


def _z_directed_distance(a: EPSet, b: EPSet) -> int:
    """``sup_{x in A} d(x, B)`` for sets with the same ends, both non-empty."""
    L = a.period * b.period // gcd(a.period, b.period)
    M = max(a.threshold, b.threshold) + 2 * L
    worst = 0
    for x in a.window(-M, M):
        k = 0
        while (x - k) not in b and (x + k) not in b:
            k += 1
        worst = max(worst, k)
    return worst


@lru_cache(maxsize=1 << 14)
def _z_lambda(a: EPSet, b: EPSet) -> RelationResult:
    if not z_lambda_rule(a, b):
        return RelationResult(False, {"ends": [sorted(a.ends), sorted(b.ends)]}, "rule", "z-metric")
    if a.is_empty:
        return RelationResult(True, {"entourage": Metric(1)}, "rule", "z-metric")
    h = max(_z_directed_distance(a, b), _z_directed_distance(b, a))
    return RelationResult(True, {"entourage": Metric(h + 1)}, "rule", "z-metric")


def _z_trace(s: EPSet, n: int = 5) -> list[int]:
    """A few members of the unbounded part, walking outwards along one end."""
    if s.is_finite:
        return []
    out = []
    sign = 1 if s.has_pos_end else -1
    x = s.threshold
    while len(out) < n:
        if sign * x in s:
            out.append(sign * x)
        x += 1
    return out


def _probe_radii(top: int) -> list[int]:
    return sorted(set(range(1, min(top, 8) + 1)) | {top})


@lru_cache(maxsize=1 << 14)
def _z_image_evidence(a: EPSet, n: EPSet) -> tuple[bool, dict]:
    # beyond the thresholds every point lies within period(A) of A's end
    top = max(a.period, 1)
    for r in _probe_radii(top):
        x = a.dilate(r) & n
        if not x.is_finite:
            return True, {"entourage": Metric(r), "unbounded": x, "trace": _z_trace(x)}
    return False, {"entourage": Metric(top), "K": a.dilate(top) & n, "stable_from_radius": top}


@lru_cache(maxsize=1 << 14)
def _z_pairs_evidence(a: EPSet, n: EPSet) -> tuple[bool, dict]:
    top = max(a.period, n.period) + 1
    probes = []
    for r in sorted({1, 2, top}):
        d = (a & n.dilate(r)) | (n & a.dilate(r))
        if not d.is_finite:
            return True, {"entourage": Metric(r), "close_points": d, "trace": _z_trace(d)}
        probes.append({"entourage": Metric(r), "D": d})
    return False, {"probes": probes, "stable_from_radius": top}


@lru_cache(maxsize=1 << 14)
def _z_resemblance_evidence(a: EPSet, n: EPSet) -> tuple[bool, dict]:
    atoms_a, atoms_n = a.residue_atoms(), n.residue_atoms()
    for x in atoms_a:
        for y in atoms_n:
            lam = _z_lambda(x, y)
            if lam.verdict:
                return True, {"A_sub": x, "C_sub": y, "entourage": lam.witness["entourage"]}
    return False, {"checked_pairs": len(atoms_a) * len(atoms_n)}


# ---------------------------------------------------------------------------
# half-line


def _q_features(s: QSet) -> dict:
    return {"interior": s.has_interior, "unbounded_interval": s.interval_unbounded, "infinite_discrete": s.discrete_infinite}


def q_b_rule(x: QSet, y: QSet) -> bool:
    """Closeness at infinity from the part structure of the two sets."""
    ix, iy = x.has_interior, y.has_interior
    ux, uy = x.interval_unbounded, y.interval_unbounded
    dx, dy = x.discrete_infinite, y.discrete_infinite
    return (ix and iy) or (ux and dy) or (dx and uy) or (dx and dy)


def q_cover_rule(a: QSet, b: QSet) -> bool:
    """Whether ``A`` sits inside some thickening ``E[B]``."""
    if a.is_empty:
        return True
    if b.is_empty:
        return False
    if a.has_bounded_interval and not b.has_interior:
        return False
    if a.interval_unbounded and not b.interval_unbounded:
        return False
    if a.discrete_infinite and not (b.discrete_infinite or b.interval_unbounded):
        return False
    return True


def q_lambda_rule(a: QSet, b: QSet) -> bool:
    return q_cover_rule(a, b) and q_cover_rule(b, a)


def _q_image(offsets, a: QSet) -> QSet:
    return QHalfLine().image(HalfLine(frozenset(offsets)), a)


def _all_dens(*sets: QSet) -> list[int]:
    dens = [1]
    for s in sets:
        for iv in s.I:
            dens.append(iv.lo.denominator)
            if iv.hi is not None:
                dens.append(iv.hi.denominator)
        dens.append(s.delta.den)
    return dens


def _generic_offset(*sets: QSet) -> Fraction:
    """``1/q`` with ``q`` a prime larger than every denominator in the data."""
    return Fraction(1, _next_prime_above(max(_all_dens(*sets))))


def _next_cover_offsets(r: QSet, b: QSet) -> set[Fraction]:
    if r.I:
        iv = r.I[0]
        if iv.hi is None:
            j = b.I[-1]
        else:
            j = next((k for k in b.I if k.hi is None), None) or b.I[0]
        if j.hi is None:
            return {iv.lo - j.lo - 1}
        ell = j.hi - j.lo
        count = int(2 * (iv.hi - iv.lo) / ell) + 1
        return {iv.lo - j.lo - ell / 2 + k * ell / 2 for k in range(count + 1)}
    if not r.delta.is_finite:
        p = r.delta.canonical().aps[0]
        bq = b.Q.canonical().aps if b.discrete_infinite else ()
        if bq:
            t = bq[0]
            m = int(_qlcm(p.step, t.step) / p.step)
            return {p.anchor + j * p.step - t.anchor for j in range(m)}
        u = b.I[-1].lo
        return {p.anchor - u - 1 + _generic_offset(r, b)}
        # the 1/q term keeps every landing point off the removed points of B
    x0 = b.some_element()
    return {x - x0 for x in r.elements()}


def cover_offsets(a: QSet, b: QSet, max_rounds: int = 32) -> list[Fraction] | None:
    """Offsets ``S`` with ``A`` inside ``E_S[B]``, or None when no thickening works."""
    if not q_cover_rule(a, b):
        return None
    offsets: set[Fraction] = {Fraction(0)}
    if a.is_empty:
        return [Fraction(0)]
    for _ in range(max_rounds):
        rest = a - _q_image(offsets, b)
        if rest.is_empty:
            return sorted({abs(c) for c in offsets})
        offsets |= _next_cover_offsets(rest, b)
    raise InconsistentWitness(f"no cover of {a!r} by {b!r} after {max_rounds} rounds")


@lru_cache(maxsize=1 << 14)
def _q_lambda(a: QSet, b: QSet) -> RelationResult:
    if not q_lambda_rule(a, b):
        return RelationResult(False, {"covers": [q_cover_rule(a, b), q_cover_rule(b, a)]}, "rule", "q-halfline")
    s = sorted(set(cover_offsets(a, b)) | set(cover_offsets(b, a)))
    return RelationResult(True, {"entourage": HalfLine(frozenset(s))}, "rule", "q-halfline")


@lru_cache(maxsize=1 << 14)
def _q_candidates(a: QSet, n: QSet) -> list[Fraction]:
    """Signed offsets ``c`` such that if any thickening of A meets N in an
    infinite set, then already ``(A + c) & N`` or ``(A - c) & N`` is infinite."""
    aps_a = a.delta.canonical().aps
    aps_n = n.delta.canonical().aps
    cosets = [solve_offset(s, t) for s in aps_a for t in aps_n]
    cosets += [solve_offset(t, s) for s in aps_a for t in aps_n]
    g = min(avoid_offset(cosets), _generic_offset(a, n))
    out = {Fraction(0), g, -g}
    for s in aps_a:
        for t in aps_n:
            out.add(t.anchor - s.anchor)
    for ia in a.I:
        for iN in n.I:
            out.add(iN.interior_point() - ia.interior_point())
    out |= {-c for c in out}
    return sorted(out)


@lru_cache(maxsize=1 << 14)
def _q_image_evidence(a: QSet, n: QSet) -> tuple[bool, dict]:
    cands = _q_candidates(a, n)
    e = HalfLine(frozenset(c for c in cands if c > 0))
    meet = QHalfLine().image(e, a) & n
    if meet.is_finite:
        return False, {"entourage": e, "K": meet}
    for c in cands:
        if c <= 0:
            continue
        single = HalfLine(frozenset({c}))
        part = QHalfLine().image(single, a) & n
        if not part.is_finite:
            return True, {"entourage": single, "unbounded": part}
    raise InconsistentWitness("thickening meets N infinitely but no single offset does")


@lru_cache(maxsize=1 << 14)
def _q_pairs_evidence(a: QSet, n: QSet) -> tuple[bool, dict]:
    cands = _q_candidates(a, n)
    e = HalfLine(frozenset(c for c in cands if c > 0))
    bk = QHalfLine()
    d = (a & bk.image(e, n)) | (n & bk.image(e, a))
    if d.is_finite:
        return False, {"probes": [{"entourage": e, "D": d}]}
    return True, {"entourage": e, "close_points": d}


@lru_cache(maxsize=1 << 14)
def _q_resemblance_evidence(a: QSet, n: QSet) -> tuple[bool, dict]:
    cands = _q_candidates(a, n)
    for c in cands:
        c_sub = n & a.shift(c)
        if c_sub.is_finite:
            continue
        a_sub = a & n.shift(-c)
        lam = _q_lambda(a_sub, c_sub)
        if lam.verdict:
            return True, {"A_sub": a_sub, "C_sub": c_sub, "offset": c, "entourage": lam.witness["entourage"]}
    return False, {"offsets_checked": cands}


# ---------------------------------------------------------------------------
# windowed


def _annulus(W: int) -> tuple[np.ndarray, np.ndarray]:
    xs = np.arange(-W, W + 1, dtype=np.int64)
    return xs, np.abs(xs) > W // 2


def _windowed_close_at(bk: Windowed, a: GeneratorSet, n: GeneratorSet, W: int) -> bool:
    R = bk.max_radius
    reach = R - 1
    base = a.mask(-W - reach, W + reach)
    near = np.zeros(2 * W + 1, dtype=bool)
    for k in range(2 * reach + 1):
        near |= base[k : k + 2 * W + 1]
    _, ann = _annulus(W)
    return bool(np.any(near & n.mask(-W, W) & ann))


def _combine(bk: Windowed, evidence: list[bool]) -> Verdict:
    if all(evidence):
        return True
    if not any(evidence):
        return False
    return UnknownAtWindow(bk.windows[-1])


def _windowed_b(bk: Windowed, a: GeneratorSet, n: GeneratorSet) -> tuple[Verdict, dict]:
    ev = [_windowed_close_at(bk, a, n, W) for W in bk.windows]
    return _combine(bk, ev), {"evidence": dict(zip(map(str, bk.windows), ev)), "max_radius": bk.max_radius}


def _directed_sup(ma: np.ndarray, mb: np.ndarray, offset: int, W: int) -> int | None:
    pa = np.flatnonzero(ma) - offset
    pa = pa[np.abs(pa) <= W]
    pb = np.flatnonzero(mb) - offset
    if len(pa) == 0:
        return 0
    if len(pb) == 0:
        return None
    i = np.searchsorted(pb, pa)
    left = np.abs(pa - pb[np.clip(i - 1, 0, len(pb) - 1)])
    right = np.abs(pb[np.clip(i, 0, len(pb) - 1)] - pa)
    return int(np.max(np.minimum(left, right)))


def _windowed_lambda(bk: Windowed, a: GeneratorSet, b: GeneratorSet) -> tuple[Verdict, dict]:
    values = []
    for W in bk.windows:
        ma, mb = a.mask(-3 * W, 3 * W), b.mask(-3 * W, 3 * W)
        h1 = _directed_sup(ma, mb, 3 * W, W)
        h2 = _directed_sup(mb, ma, 3 * W, W)
        values.append(None if h1 is None or h2 is None else max(h1, h2))
    info = {"sup_distance": dict(zip(map(str, bk.windows), values))}
    if all(v is not None for v in values) and len(set(values)) == 1:
        return True, info
    if all(v is None for v in values):
        return False, info
    finite = [v for v in values if v is not None]
    if values[-1] is None or (finite == sorted(finite) and len(set(finite)) == len(finite)):
        return False, info
    return UnknownAtWindow(bk.windows[-1]), info


# ---------------------------------------------------------------------------
# public deciders


def _evidence(backend, mode: str, a, n) -> tuple[Verdict, dict]:
    if mode == "rule":
        if isinstance(backend, ZMetric):
            backend.check(a, n)
            return z_b_rule(a, n), {"ends": [sorted(a.ends), sorted(n.ends)]}
        if isinstance(backend, QHalfLine):
            backend.check(a, n)
            return q_b_rule(a, n), {"features": [_q_features(a), _q_features(n)]}
        raise ValueError("rule mode needs an exact backend")
    if isinstance(backend, ZMetric):
        backend.check(a, n)
        fn = {"image": _z_image_evidence, "disjoint": _z_resemblance_evidence,
              "resemblance": _z_resemblance_evidence, "pairs": _z_pairs_evidence}[mode]
        return fn(a, n)
    if isinstance(backend, QHalfLine):
        backend.check(a, n)
        fn = {"image": _q_image_evidence, "disjoint": _q_resemblance_evidence,
              "resemblance": _q_resemblance_evidence, "pairs": _q_pairs_evidence}[mode]
        return fn(a, n)
    if isinstance(backend, Windowed):
        backend.check(a, n)
        return _windowed_b(backend, a, n)
    raise TypeError(f"unknown backend {backend!r}")


def lambda_rel(backend, a, b) -> RelationResult:
    if isinstance(backend, ZMetric):
        backend.check(a, b)
        return _z_lambda(a, b)
    if isinstance(backend, QHalfLine):
        backend.check(a, b)
        return _q_lambda(a, b)
    backend.check(a, b)
    v, info = _windowed_lambda(backend, a, b)
    return RelationResult(v, info, "window", backend.name)


def asym_bounded(backend, a) -> Verdict:
    """``A`` resembles a single point (the empty set counts as bounded)."""
    if isinstance(backend, (ZMetric, QHalfLine)):
        backend.check(a)
        if a.is_empty:
            return True
        return lambda_rel(backend, a, backend.point(a.some_element())).verdict
    return lambda_rel(backend, a, backend.point(0)).verdict if backend.bounded(a) is not True else True


def prec(backend, a, b, mode: str = "image") -> RelationResult:
    """``A`` prec ``B``: every thickening of A lies in B up to a bounded set."""
    if mode not in PREC_MODES + ("rule",):
        raise ValueError(f"prec mode must be one of {PREC_MODES + ('rule',)}")
    found, info = _evidence(backend, mode, a, backend.complement(b))
    return RelationResult(_negate(found), info, mode, backend.name)


def b_rel(backend, a, b, mode: str = "image") -> RelationResult:
    """Closeness at infinity: some thickening of A meets B in an unbounded set."""
    if mode not in B_MODES + ("rule",):
        raise ValueError(f"b mode must be one of {B_MODES + ('rule',)}")
    found, info = _evidence(backend, mode, a, b)
    return RelationResult(found, info, mode, backend.name)


def nbhd(backend, a, b, mode: str = "image") -> RelationResult:
    """``A << B`` iff A is not close to the complement of B."""
    r = b_rel(backend, a, backend.complement(b), {"disjoint": "resemblance"}.get(mode, mode))
    return RelationResult(_negate(r.verdict), r.witness, mode, backend.name)


def derive_b_from_nbhd(backend, nbhd_fn: Callable) -> Callable:
    """The closeness relation induced by a neighborhood relation."""

    def b_fn(a, b) -> bool:
        return not bool(nbhd_fn(a, backend.complement(b)))

    return b_fn


def nbhd_from_b(backend, b_fn: Callable) -> Callable:
    def nbhd_fn(a, b) -> bool:
        return not bool(b_fn(a, backend.complement(b)))

    return nbhd_fn


# ---------------------------------------------------------------------------
# witness replay


def check_witness(backend, relation: str, a, b, result: RelationResult) -> bool:
    """Recompute the data in ``result`` from scratch; exact backends only."""
    w = result.witness or {}
    v = result.verdict
    if relation == "lambda":
        if not v:
            return not (isinstance(backend, ZMetric) and z_lambda_rule(a, b)) and not (
                isinstance(backend, QHalfLine) and q_lambda_rule(a, b)
            )
        e = w["entourage"]
        return a <= backend.image(e, b) and b <= backend.image(e, a)
    if relation in ("prec", "nbhd"):
        n = backend.complement(b)
        found = not v
    elif relation == "b":
        n = b
        found = bool(v)
    else:
        raise ValueError(relation)
    mode = result.mode
    if mode == "rule":
        rule = z_b_rule if isinstance(backend, ZMetric) else q_b_rule
        return rule(a, n) == found
    if found:
        if "A_sub" in w:
            sa, sc = w["A_sub"], w["C_sub"]
            e = w["entourage"]
            return (
                sa <= a and sc <= n and not backend.bounded(sa)
                and sa <= backend.image(e, sc) and sc <= backend.image(e, sa)
            )
        e = w["entourage"]
        if mode == "pairs":
            d = (a & backend.image(e, n)) | (n & backend.image(e, a))
        else:
            d = backend.image(e, a) & n
        return not backend.bounded(d)
    if mode == "image":
        k = w["K"]
        e = w["entourage"]
        # the K-witness: E[A] inside (X \ N) union K, and A \ K inside X \ N
        return backend.bounded(k) and (backend.image(e, a) - k) & n == backend.empty and (a - k) & n == backend.empty
    if mode == "pairs":
        for p in w["probes"]:
            e, d = p["entourage"], p["D"]
            if not backend.bounded(d):
                return False
            if d != (a & backend.image(e, n)) | (n & backend.image(e, a)):
                return False
        return True
    return True
