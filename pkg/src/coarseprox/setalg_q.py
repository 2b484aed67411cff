"""Exact subsets of the non-negative rationals.

Three layers:

* ``RatAP`` / ``RatCoset``: one-sided progressions ``a + d*k (k >= 0)`` and
  two-sided cosets ``a + d*Z`` with rational data, plus the kernel queries
  (intersection, offset solving, offset avoidance).
* ``DiscreteSet``: finite unions of progressions plus/minus finite sets.
  Internally every such set is an eventually periodic set of integers
  scaled by ``1/den``.
* ``QSet``: ``(U \\ P) | Q`` with ``U`` a finite union of intervals.  Stored as
  an interval part ``I`` and a locally finite perturbation ``delta`` (the
  points where membership differs from ``I``).  Boolean operations work
  cell by cell between interval endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import count
from math import ceil, floor, gcd
from typing import Iterable, Iterator, Sequence

from .setalg_z import EMPTY as EP_EMPTY
from .setalg_z import EPSet, ep_normalize

__all__ = [
    "RatAP",
    "RatCoset",
    "DiscreteSet",
    "Interval",
    "QSet",
    "ap_intersect",
    "ap_subtract",
    "ap_infinite",
    "solve_offset",
    "avoid_offset",
    "q_boolean",
    "q_membership",
    "to_frac",
    "frac_str",
]

Rational = Fraction | int | str


def to_frac(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def frac_str(x: Fraction) -> str:
    return str(Fraction(x))


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _common_den(values: Iterable[Fraction]) -> int:
    q = 1
    for v in values:
        q = _lcm(q, Fraction(v).denominator)
    return q


def _qgcd(a: Fraction, b: Fraction) -> Fraction:
    """Generator of the group a*Z + b*Z for positive rationals."""
    q = _lcm(a.denominator, b.denominator)
    return Fraction(gcd(int(a * q), int(b * q)), q)


def _qlcm(a: Fraction, b: Fraction) -> Fraction:
    q = _lcm(a.denominator, b.denominator)
    return Fraction(_lcm(int(a * q), int(b * q)), q)


# ---------------------------------------------------------------------------
# progressions


@dataclass(frozen=True, order=True)
class RatAP:
    """``{anchor + step*k : k >= 0}``."""

    anchor: Fraction
    step: Fraction

    def __post_init__(self):
        object.__setattr__(self, "anchor", to_frac(self.anchor))
        object.__setattr__(self, "step", to_frac(self.step))
        if self.step <= 0:
            raise ValueError("progression step must be positive")
        if self.anchor < 0:
            raise ValueError("progression anchor must be non-negative")

    def __contains__(self, x) -> bool:
        x = to_frac(x)
        if x < self.anchor:
            return False
        return ((x - self.anchor) / self.step).denominator == 1

    def first(self, n: int) -> list[Fraction]:
        return [self.anchor + self.step * k for k in range(n)]

    def to_json(self) -> dict:
        return {"a": frac_str(self.anchor), "d": frac_str(self.step)}

    @classmethod
    def from_json(cls, data: dict) -> RatAP:
        return cls(to_frac(data["a"]), to_frac(data["d"]))


@dataclass(frozen=True, order=True)
class RatCoset:
    """``{anchor + step*k : k in Z}`` with ``0 <= anchor < step``."""

    anchor: Fraction
    step: Fraction

    def __post_init__(self):
        step = to_frac(self.step)
        if step <= 0:
            raise ValueError("coset step must be positive")
        a = to_frac(self.anchor)
        a = a - step * floor(a / step)
        object.__setattr__(self, "anchor", a)
        object.__setattr__(self, "step", step)

    def __contains__(self, x) -> bool:
        return ((to_frac(x) - self.anchor) / self.step).denominator == 1

    def to_json(self) -> dict:
        return {"a": frac_str(self.anchor), "d": frac_str(self.step)}

    @classmethod
    def from_json(cls, data: dict) -> RatCoset:
        return cls(to_frac(data["a"]), to_frac(data["d"]))


def ap_intersect(p: RatAP, q: RatAP) -> RatAP | None:
    """Exact intersection of two one-sided progressions (a progression or empty)."""
    M = _common_den([p.anchor, p.step, q.anchor, q.step])
    a1, d1 = int(p.anchor * M), int(p.step * M)
    a2, d2 = int(q.anchor * M), int(q.step * M)
    g = gcd(d1, d2)
    if (a2 - a1) % g:
        return None
    l = d1 // g * d2
    # x = a1 + d1*t with d1*t = a2 - a1 (mod d2)
    t = ((a2 - a1) // g * pow(d1 // g, -1, d2 // g)) % (d2 // g) if d2 // g > 1 else 0
    x = a1 + d1 * t
    lo = max(a1, a2)
    if x < lo:
        x += ((lo - x + l - 1) // l) * l
    x -= ((x - lo) // l) * l
    return RatAP(Fraction(x, M), Fraction(l, M))


def ap_subtract(p: RatAP, others: Sequence[RatAP]) -> DiscreteSet:
    """``p`` minus the union of ``others``."""
    return DiscreteSet.of([p]) - DiscreteSet.of(list(others))


def ap_infinite(result) -> bool:
    """Whether a kernel result (progression, discrete set, or None) is infinite."""
    if result is None:
        return False
    if isinstance(result, RatAP):
        return True
    return not result.is_finite


def solve_offset(source: RatAP, target: RatAP) -> RatCoset:
    """All offsets ``c`` with ``(source + c) & target`` infinite."""
    return RatCoset(target.anchor - source.anchor, _qgcd(source.step, target.step))


def _next_prime_above(n: int) -> int:
    for m in count(max(2, n + 1)):
        if all(m % p for p in range(2, int(m**0.5) + 1)):
            return m
    raise AssertionError


def avoid_offset(cosets: Iterable[RatCoset | RatAP]) -> Fraction:
    """A positive rational outside every given coset.

    Takes ``1/q`` for the least prime ``q`` above every denominator in the
    data; members of the cosets have denominators built from smaller primes
    only, so ``1/q`` is never among them.
    """
    dens = [1]
    for c in cosets:
        dens.append(Fraction(c.anchor).denominator)
        dens.append(Fraction(c.step).denominator)
    q = _next_prime_above(max(max(dens), 1))
    c = Fraction(1, q)
    if any(c in s for s in cosets):  # pragma: no cover - guarded by the prime argument
        raise AssertionError("avoid_offset landed in a coset")
    return c


# ---------------------------------------------------------------------------
# discrete sets


@dataclass(frozen=True)
class DiscreteSet:
    """``(union of aps | extra) - removed``; canonical instances have ``removed`` empty."""

    aps: tuple[RatAP, ...] = ()
    extra: frozenset[Fraction] = frozenset()
    removed: frozenset[Fraction] = frozenset()

    @classmethod
    def of(cls, aps: Iterable[RatAP] = (), extra: Iterable[Rational] = (), removed: Iterable[Rational] = ()) -> DiscreteSet:
        aps = tuple(aps)
        extra = [to_frac(x) for x in extra]
        removed = [to_frac(x) for x in removed]
        for x in extra:
            if x < 0:
                raise ValueError(f"negative point {x} in discrete set")
        den = _common_den([a.anchor for a in aps] + [a.step for a in aps] + extra + removed)
        ep = EPSet.union_of_aps([(int(a.anchor * den), int(a.step * den)) for a in aps], (int(x * den) for x in extra))
        if removed:
            ep = ep - EPSet.finite(int(x * den) for x in removed if x >= 0)
        return cls._from_lattice(den, ep)

    @classmethod
    def _from_lattice(cls, den: int, ep: EPSet) -> DiscreteSet:
        if ep.neg or any(x < 0 for x in ep.exceptions):
            ep = ep & _NONNEG
        den, ep = _reduce_lattice(den, ep)
        L, T = ep.period, ep.threshold
        aps = []
        for r in sorted(ep.pos):
            x0 = T + (r - T) % L
            aps.append(RatAP(Fraction(x0, den), Fraction(L, den)))
        obj = cls(tuple(sorted(aps)), frozenset(Fraction(f, den) for f in ep.exceptions), frozenset())
        obj.__dict__["_lattice"] = (den, ep)
        return obj

    @cached_property
    def _lattice(self) -> tuple[int, EPSet]:
        return DiscreteSet.of(self.aps, self.extra, self.removed)._lattice

    def canonical(self) -> DiscreteSet:
        den, ep = self._lattice
        return DiscreteSet._from_lattice(den, ep)

    def _lift(self, den: int) -> EPSet:
        d, ep = self._lattice
        return ep.scale(den // d)

    def _binary(self, other: DiscreteSet, op: str) -> DiscreteSet:
        return _discrete_binary(self, other, op)

    def _binary_uncached(self, other: DiscreteSet, op: str) -> DiscreteSet:
        if not self.aps and not other.aps:
            xs, ys = self.extra - self.removed, other.extra - other.removed
            return DiscreteSet.of((), {"union": xs | ys, "inter": xs & ys, "diff": xs - ys}[op])
        if not other.aps and not other.extra:
            return self if op != "inter" else EMPTY_DISCRETE
        if not self.aps and not self.extra:
            return other if op == "union" else EMPTY_DISCRETE
        den = _lcm(self._lattice[0], other._lattice[0])
        a, b = self._lift(den), other._lift(den)
        res = {"union": a | b, "inter": a & b, "diff": a - b}[op]
        return DiscreteSet._from_lattice(den, res)

    def __or__(self, other: DiscreteSet) -> DiscreteSet:
        return self._binary(other, "union")

    def __and__(self, other: DiscreteSet) -> DiscreteSet:
        return self._binary(other, "inter")

    def __sub__(self, other: DiscreteSet) -> DiscreteSet:
        return self._binary(other, "diff")

    def __contains__(self, x) -> bool:
        x = to_frac(x)
        den, ep = self._lattice
        y = x * den
        return y.denominator == 1 and int(y) in ep

    @property
    def den(self) -> int:
        return self._lattice[0]

    @property
    def is_empty(self) -> bool:
        return self._lattice[1].is_empty

    @property
    def is_finite(self) -> bool:
        return self._lattice[1].is_finite

    def elements(self) -> list[Fraction]:
        den, ep = self._lattice
        return [Fraction(x, den) for x in ep.elements()]

    def __iter__(self) -> Iterator[Fraction]:
        den, ep = self._lattice
        n = 0
        while True:
            if n >= ep.threshold and not ep.pos:
                return
            if n in ep:
                yield Fraction(n, den)
            n += 1

    def first(self, n: int) -> list[Fraction]:
        out = []
        for x in self:
            if len(out) >= n:
                break
            out.append(x)
        return out

    def shift(self, c: Rational) -> DiscreteSet:
        """``{x + c : x in self} & [0, oo)``."""
        c = to_frac(c)
        den = _lcm(self._lattice[0], c.denominator)
        return DiscreteSet._from_lattice(den, self._lift(den).shift(int(c * den)))

    def restrict(self, lo: Fraction, hi: Fraction | None, lo_open: bool, hi_open: bool) -> DiscreteSet:
        """Intersection with one interval."""
        den, ep = self._lattice
        y = lo * den
        if y.denominator == 1:
            n_lo = int(y) + 1 if lo_open else int(y)
        else:
            n_lo = ceil(y)
        n_lo = max(n_lo, 0)
        if hi is None:
            return DiscreteSet._from_lattice(den, ep & EPSet.tail_ap(n_lo, 1))
        y = hi * den
        n_hi = floor(y) - 1 if hi_open and y.denominator == 1 else floor(y)
        return DiscreteSet._from_lattice(den, EPSet.finite(ep.members_between(n_lo, n_hi)))

    def restrict_to(self, intervals: Iterable[Interval]) -> DiscreteSet:
        out = EMPTY_DISCRETE
        for iv in intervals:
            out = out | self.restrict(iv.lo, iv.hi, iv.lo_open, iv.hi_open)
        return out

    def progressions(self) -> tuple[RatAP, ...]:
        return self.canonical().aps

    def to_json(self) -> dict:
        c = self.canonical()
        return {
            "aps": [a.to_json() for a in c.aps],
            "extra": [frac_str(x) for x in sorted(c.extra)],
            "removed": [],
        }

    @classmethod
    def from_json(cls, data: dict) -> DiscreteSet:
        return cls.of(
            [RatAP.from_json(a) for a in data.get("aps", [])],
            [to_frac(x) for x in data.get("extra", [])],
            [to_frac(x) for x in data.get("removed", [])],
        )


@lru_cache(maxsize=1 << 16)
def _discrete_binary(a: DiscreteSet, b: DiscreteSet, op: str) -> DiscreteSet:
    return a._binary_uncached(b, op)


_NONNEG = EPSet.tail_ap(0, 1)


def _reduce_lattice(den: int, ep: EPSet) -> tuple[int, EPSet]:
    if ep.is_empty:
        return 1, EP_EMPTY
    g = den
    for f in ep.exceptions:
        g = gcd(g, f)
    if ep.pos:
        g = gcd(g, ep.period)
        for r in ep.pos:
            g = gcd(g, r)
    if g <= 1:
        return den, ep
    L = ep.period // g if ep.pos else 1
    T = -(-ep.threshold // g)
    pos = {(r // g) % L for r in ep.pos}
    member = lambda n: n * g in ep  # noqa: E731
    F = {n for n in range(-T + 1, T) if member(n)}
    return den // g, ep_normalize(L, pos, (), T, F)


EMPTY_DISCRETE = DiscreteSet()


# ---------------------------------------------------------------------------
# intervals


@dataclass(frozen=True, order=True)
class Interval:
    """Rational interval; ``hi is None`` means unbounded above."""

    lo: Fraction
    hi: Fraction | None
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", to_frac(self.lo))
        if self.hi is not None:
            object.__setattr__(self, "hi", to_frac(self.hi))
        else:
            object.__setattr__(self, "hi_open", True)

    def __contains__(self, x) -> bool:
        x = to_frac(x)
        if x < self.lo or (self.lo_open and x == self.lo):
            return False
        if self.hi is None:
            return True
        return x < self.hi or (not self.hi_open and x == self.hi)

    @property
    def bounded(self) -> bool:
        return self.hi is not None

    @property
    def is_empty(self) -> bool:
        if self.hi is None:
            return False
        if self.lo < self.hi:
            return False
        return self.lo > self.hi or self.lo_open or self.hi_open

    def interior_point(self) -> Fraction:
        if self.hi is None:
            return self.lo + 1
        return (self.lo + self.hi) / 2

    def shift(self, c: Fraction) -> Interval | None:
        """Translate by ``c`` and clip to ``[0, oo)``."""
        lo, lo_open = self.lo + c, self.lo_open
        hi = None if self.hi is None else self.hi + c
        if hi is not None and (hi < 0 or (hi == 0 and self.hi_open)):
            return None
        if lo < 0:
            lo, lo_open = Fraction(0), False
        out = Interval(lo, hi, lo_open, self.hi_open)
        return None if out.is_empty else out

    def to_json(self) -> list:
        return [frac_str(self.lo), "inf" if self.hi is None else frac_str(self.hi), self.lo_open, self.hi_open]

    @classmethod
    def from_json(cls, data: Sequence) -> Interval:
        lo, hi, lo_open, hi_open = data
        return cls(to_frac(lo), None if hi in ("inf", None) else to_frac(hi), bool(lo_open), bool(hi_open))


def _in_intervals(intervals: Sequence[Interval], x: Fraction) -> bool:
    return any(x in iv for iv in intervals)


def _breakpoints(*groups: Sequence[Interval]) -> list[Fraction]:
    pts = {Fraction(0)}
    for g in groups:
        for iv in g:
            pts.add(iv.lo)
            if iv.hi is not None:
                pts.add(iv.hi)
    return sorted(p for p in pts if p >= 0)


def _open_cells(bps: list[Fraction]) -> list[tuple[Fraction, Fraction | None]]:
    return [(b, bps[i + 1] if i + 1 < len(bps) else None) for i, b in enumerate(bps)]


def _cell_rep(cell: tuple[Fraction, Fraction | None]) -> Fraction:
    lo, hi = cell
    return lo + 1 if hi is None else (lo + hi) / 2


def _assemble(bps: list[Fraction], point_vals: list[bool], open_vals: list[bool]) -> tuple[Interval, ...]:
    """Maximal runs of true cells, walking point_0, open_0, point_1, open_1, ..."""
    cells = []
    for i, b in enumerate(bps):
        cells.append(("pt", b, point_vals[i]))
        hi = bps[i + 1] if i + 1 < len(bps) else None
        cells.append(("open", (b, hi), open_vals[i]))
    out = []
    run = []
    for cell in cells + [("end", None, False)]:
        if cell[2]:
            run.append(cell)
            continue
        if run:
            first, last = run[0], run[-1]
            if first[0] == "pt":
                lo, lo_open = first[1], False
            else:
                lo, lo_open = first[1][0], True
            if last[0] == "pt":
                hi, hi_open = last[1], False
            else:
                hi, hi_open = last[1][1], True
            out.append(Interval(lo, hi, lo_open, hi_open))
            run = []
    return tuple(out)


# ---------------------------------------------------------------------------
# QSet


@dataclass(frozen=True)
class QSet:
    """Subset of Q>=0 equal to the interval union ``I`` toggled on the discrete set ``delta``."""

    I: tuple[Interval, ...]
    delta: DiscreteSet

    # set view: (U \ P) | Q
    @property
    def U(self) -> tuple[Interval, ...]:
        return self.I

    @cached_property
    def P(self) -> DiscreteSet:
        return self.delta.restrict_to(self.I)

    @cached_property
    def Q(self) -> DiscreteSet:
        return self.delta - self.P

    def __contains__(self, x) -> bool:
        x = to_frac(x)
        if x < 0:
            return False
        return _in_intervals(self.I, x) != (x in self.delta)

    def __or__(self, other: QSet) -> QSet:
        return q_boolean("union", self, other)

    def __and__(self, other: QSet) -> QSet:
        return q_boolean("inter", self, other)

    def __sub__(self, other: QSet) -> QSet:
        return q_boolean("diff", self, other)

    def __invert__(self) -> QSet:
        return q_boolean("compl", self)

    def __le__(self, other: QSet) -> bool:
        return (self - other).is_empty

    @property
    def is_empty(self) -> bool:
        return not self.I and self.delta.is_empty

    @property
    def is_finite(self) -> bool:
        return not self.I and self.delta.is_finite

    @property
    def has_interior(self) -> bool:
        return bool(self.I)

    @property
    def has_bounded_interval(self) -> bool:
        return any(iv.bounded for iv in self.I)

    @property
    def interval_unbounded(self) -> bool:
        return bool(self.I) and self.I[-1].hi is None

    @property
    def discrete_infinite(self) -> bool:
        """Whether the isolated-point part ``Q`` is infinite."""
        return not self.delta.is_finite and not self.interval_unbounded

    @property
    def removed_infinite(self) -> bool:
        """Whether the excised part ``P`` is infinite."""
        return not self.delta.is_finite and self.interval_unbounded

    def elements(self) -> list[Fraction]:
        if not self.is_finite:
            raise ValueError("infinite set has no element list")
        return self.delta.elements()

    def some_element(self) -> Fraction | None:
        if self.I:
            iv = self.I[0]
            candidates = [] if iv.lo_open else [iv.lo]
            p = iv.interior_point()
            step = (p - iv.lo) / 2
            for k in range(64):
                candidates.append(p)
                candidates.append(p + step / (k + 2))
                p = iv.lo + (p - iv.lo) / 2
            for x in candidates:
                if x in self:
                    return x
            raise AssertionError("interval exhausted by a discrete set")  # pragma: no cover
        for x in self.delta:
            return x
        return None

    def discrete_points(self) -> Iterator[Fraction]:
        """Increasing enumeration of a set without interval content."""
        if self.I:
            raise ValueError("set has interval content")
        return iter(self.delta)

    def shift(self, c: Rational) -> QSet:
        """``{x + c : x in self} & Q>=0``."""
        return _q_shift(self, to_frac(c))

    def _shift(self, c: Fraction) -> QSet:
        ivs = [s for s in (iv.shift(c) for iv in self.I) if s is not None]
        return _canonical(tuple(ivs), self.delta.shift(c))

    def restrict_from(self, t: Fraction) -> QSet:
        if t <= 0:
            return self
        return self & QSet.interval(t, None)

    def to_json(self) -> dict:
        return {
            "U": [iv.to_json() for iv in self.I],
            "P": self.P.to_json(),
            "Q": self.Q.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> QSet:
        U = QSet.from_intervals([Interval.from_json(x) for x in data.get("U", [])])
        P = QSet.discrete(DiscreteSet.from_json(data.get("P", {})))
        Q = QSet.discrete(DiscreteSet.from_json(data.get("Q", {})))
        return (U - P) | Q

    def __repr__(self) -> str:
        ivs = ", ".join(_fmt_interval(iv) for iv in self.I)
        d = self.delta.canonical()
        aps = ", ".join(f"AP({a.anchor},{a.step})" for a in d.aps)
        pts = ", ".join(str(x) for x in sorted(d.extra))
        return f"QSet(I=[{ivs}], delta=[{aps}] + {{{pts}}})"

    # constructors

    @classmethod
    def interval(cls, lo: Rational, hi: Rational | None, lo_open: bool = False, hi_open: bool = False) -> QSet:
        return cls.from_intervals([Interval(to_frac(lo), None if hi is None else to_frac(hi), lo_open, hi_open)])

    @classmethod
    def from_intervals(cls, intervals: Iterable[Interval]) -> QSet:
        ivs = []
        for iv in intervals:
            if iv.lo < 0:
                raise ValueError("interval reaches below 0")
            if not iv.is_empty:
                ivs.append(iv)
        bps = _breakpoints(ivs)
        pv = [_in_intervals(ivs, b) for b in bps]
        ov = [_in_intervals(ivs, _cell_rep(c)) for c in _open_cells(bps)]
        return _canonical(_assemble(bps, pv, ov), EMPTY_DISCRETE)

    @classmethod
    def discrete(cls, ds: DiscreteSet) -> QSet:
        return cls((), ds.canonical())

    @classmethod
    def finite(cls, values: Iterable[Rational]) -> QSet:
        return cls.discrete(DiscreteSet.of((), values))

    @classmethod
    def ap(cls, anchor: Rational, step: Rational) -> QSet:
        return cls.discrete(DiscreteSet.of([RatAP(to_frac(anchor), to_frac(step))]))


def _fmt_interval(iv: Interval) -> str:
    left = "(" if iv.lo_open else "["
    if iv.hi is None:
        return f"{left}{iv.lo},oo)"
    right = ")" if iv.hi_open else "]"
    return f"{left}{iv.lo},{iv.hi}{right}"


def _canonical(I_raw: tuple[Interval, ...], delta: DiscreteSet) -> QSet:
    """Canonical (I, delta): no isolated points in I, endpoint flags follow membership,
    intervals separated by gaps of positive length."""
    bps = _breakpoints(I_raw)
    cells = _open_cells(bps)
    ov = [_in_intervals(I_raw, _cell_rep(c)) for c in cells]
    pv = []
    toggles = []
    for i, b in enumerate(bps):
        left = ov[i - 1] if i > 0 else False
        right = ov[i]
        member = _in_intervals(I_raw, b) != (b in delta)
        if left and right:
            pv.append(True)
            if not member:
                toggles.append(b)
        elif left or right:
            pv.append(member)
        else:
            pv.append(False)
            if member:
                toggles.append(b)
    I = _assemble(bps, pv, ov)
    stale = [b for b in bps if b in delta]
    new_delta = delta - DiscreteSet.of((), stale) if stale else delta
    if toggles:
        new_delta = new_delta | DiscreteSet.of((), toggles)
    return QSet(I, new_delta)


_BOOL = {
    "union": lambda a, b: a or b,
    "inter": lambda a, b: a and b,
    "diff": lambda a, b: a and not b,
    "compl": lambda a, b: not a,
}


@lru_cache(maxsize=1 << 16)
def q_boolean(op: str, a: QSet, b: QSet | None = None) -> QSet:
    """Pointwise Boolean combination; ``b`` is ignored for ``compl``."""
    if op not in _BOOL:
        raise ValueError(f"unknown operation {op!r}")
    if b is None:
        if op != "compl":
            raise ValueError(f"{op} needs two operands")
        b = EMPTY
    f = _BOOL[op]
    if not a.I and not b.I and op != "compl":
        return QSet((), {"union": a.delta | b.delta, "inter": a.delta & b.delta, "diff": a.delta - b.delta}[op])
    bps = _breakpoints(a.I, b.I)
    cells = _open_cells(bps)
    if a.delta.is_empty and b.delta.is_empty:
        atoms = {}
    else:
        atoms = {
            (True, True): a.delta & b.delta,
            (True, False): a.delta - b.delta,
            (False, True): b.delta - a.delta,
        }
    pv, ov = [], []
    pieces = EMPTY_DISCRETE
    flagged = []
    for p in bps:
        ia, ib = _in_intervals(a.I, p), _in_intervals(b.I, p)
        base = f(ia, ib)
        pv.append(base)
        if f(p in a, p in b) != base:
            flagged.append(p)
    runs: dict[tuple[bool, bool], list[list]] = {k: [] for k in atoms}
    for cell in cells:
        rep = _cell_rep(cell)
        ia, ib = _in_intervals(a.I, rep), _in_intervals(b.I, rep)
        base = f(ia, ib)
        ov.append(base)
        lo, hi = cell
        for (d1, d2), atom in atoms.items():
            if atom.is_empty or f(ia != d1, ib != d2) == base:
                continue
            r = runs[(d1, d2)]
            # neighbouring toggled cells merge; the shared breakpoint is removed below
            if r and r[-1][1] == lo:
                r[-1][1] = hi
            else:
                r.append([lo, hi])
    for key, rs in runs.items():
        for lo, hi in rs:
            pieces = pieces | atoms[key].restrict(lo, hi, True, True)
    if not pieces.is_empty and bps:
        pieces = pieces - DiscreteSet.of((), bps)
    I_raw = _assemble(bps, pv, ov)
    delta = pieces | DiscreteSet.of((), flagged) if flagged else pieces
    return _canonical(I_raw, delta)


def _merge_intervals(ivs: Iterable[Interval]) -> list[Interval]:
    """Union of intervals as disjoint runs (endpoint flags merged, no canonical cleanup)."""
    out: list[Interval] = []
    for n in sorted(ivs, key=lambda iv: (iv.lo, iv.lo_open)):
        if n.is_empty:
            continue
        if out:
            c = out[-1]
            if c.hi is None or n.lo < c.hi or (n.lo == c.hi and not (c.hi_open and n.lo_open)):
                if c.hi is None or n.hi is None:
                    hi, hi_open = None, True
                elif n.hi > c.hi:
                    hi, hi_open = n.hi, n.hi_open
                elif n.hi == c.hi:
                    hi, hi_open = c.hi, c.hi_open and n.hi_open
                else:
                    hi, hi_open = c.hi, c.hi_open
                out[-1] = Interval(c.lo, hi, c.lo_open, hi_open)
                continue
        out.append(n)
    return out


def _discrete_union(parts: Iterable[DiscreteSet]) -> DiscreteSet:
    aps, extra = [], []
    for d in parts:
        d = d.canonical() if d.removed else d
        aps.extend(d.aps)
        extra.extend(d.extra)
    return DiscreteSet.of(aps, extra) if aps or extra else EMPTY_DISCRETE


def q_union_all(sets: Iterable[QSet]) -> QSet:
    """Union of many sets in one pass.

    A point of the interval hull survives unless every set whose intervals
    contain it has excised it; isolated points of any set always survive.
    """
    sets = [s for s in sets if s.I or not s.delta.is_empty]
    if not sets:
        return EMPTY
    if len(sets) == 1:
        return sets[0]
    base = QSet.from_intervals(_merge_intervals(iv for s in sets for iv in s.I))
    added = _discrete_union(s.Q for s in sets)
    cut = _discrete_union(s.P for s in sets)
    for s in sets:
        if cut.is_empty:
            break
        inside = cut.restrict_to(s.I)
        if not inside.is_empty:
            cut = (cut - inside) | (inside & s.P)
    out = base - QSet((), cut) if not cut.is_empty else base
    return out | QSet((), added) if not added.is_empty else out


@lru_cache(maxsize=1 << 16)
def _q_shift(a: QSet, c: Fraction) -> QSet:
    return a._shift(c)


def q_membership(a: QSet, x: Rational) -> bool:
    x = to_frac(x)
    if x < 0:
        raise ValueError(f"{x} is outside Q>=0")
    return x in a


EMPTY = QSet((), EMPTY_DISCRETE)
ALL = QSet((Interval(Fraction(0), None, False, True),), EMPTY_DISCRETE)
NAT = QSet.ap(1, 1)
