"""Eventually periodic subsets of the integers.

A set is described by a period ``L``, residue sets for each end, a threshold
``T`` and a finite exception set inside the open window ``(-T, T)``::

    x in S  <=>  (x >= T and x % L in pos)
              or (x <= -T and (-x) % L in neg)
              or x in F

The canonical form (minimal ``L``, then minimal ``T``) makes set equality
structural equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt, lcm
from typing import Callable, Iterable, Iterator

__all__ = [
    "EPSet",
    "EMPTY",
    "INTEGERS",
    "ep_normalize",
    "ep_boolean",
    "ep_membership",
    "ep_from_json",
]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _minimal_period(residues: frozenset[int], period: int) -> int:
    for d in _divisors(period):
        if all(((r + d) % period in residues) for r in residues):
            return d
    return period


@dataclass(frozen=True)
class EPSet:
    period: int
    pos: frozenset[int]
    neg: frozenset[int]
    threshold: int
    exceptions: frozenset[int]

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError(f"period must be positive, got {self.period}")
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")
        for r in self.pos | self.neg:
            if not 0 <= r < self.period:
                raise ValueError(f"residue {r} outside [0, {self.period})")
        for x in self.exceptions:
            if not -self.threshold < x < self.threshold:
                raise ValueError(f"exception {x} outside window (-{self.threshold}, {self.threshold})")

    def __contains__(self, x: int) -> bool:
        if x >= self.threshold and x % self.period in self.pos:
            return True
        if x <= -self.threshold and (-x) % self.period in self.neg:
            return True
        return x in self.exceptions

    # Boolean algebra via operators
    def __or__(self, other: EPSet) -> EPSet:
        return ep_boolean("union", self, other)

    def __and__(self, other: EPSet) -> EPSet:
        return ep_boolean("inter", self, other)

    def __sub__(self, other: EPSet) -> EPSet:
        return ep_boolean("diff", self, other)

    def __invert__(self) -> EPSet:
        return ep_boolean("compl", self)

    def __le__(self, other: EPSet) -> bool:
        return (self - other).is_empty

    @property
    def is_empty(self) -> bool:
        return not self.pos and not self.neg and not self.exceptions

    @property
    def is_finite(self) -> bool:
        return not self.pos and not self.neg

    @property
    def has_pos_end(self) -> bool:
        return bool(self.pos)

    @property
    def has_neg_end(self) -> bool:
        return bool(self.neg)

    @property
    def ends(self) -> frozenset[int]:
        """Directions (+1 / -1) in which the set is unbounded."""
        out = set()
        if self.pos:
            out.add(1)
        if self.neg:
            out.add(-1)
        return frozenset(out)

    def window(self, lo: int, hi: int) -> list[int]:
        """Members in the closed range [lo, hi]."""
        return [x for x in range(lo, hi + 1) if x in self]

    def members_between(self, lo: int, hi: int) -> list[int]:
        """Members in the closed range [lo, hi], enumerated residue by residue."""
        out = {x for x in self.exceptions if lo <= x <= hi}
        L, T = self.period, self.threshold
        for r in self.pos:
            start = max(lo, T)
            out.update(range(start + (r - start) % L, hi + 1, L))
        for r in self.neg:
            # y = -x with T <= y, -hi <= y <= -lo
            start = max(-hi, T)
            out.update(-y for y in range(start + (r - start) % L, -lo + 1, L))
        return sorted(out)

    def elements(self) -> list[int]:
        if not self.is_finite:
            raise ValueError("infinite set has no element list")
        return sorted(self.exceptions)

    def some_element(self) -> int | None:
        """Element of least absolute value (ties broken towards negative)."""
        if self.is_empty:
            return None
        bound = self.threshold + self.period
        for k in range(bound + 1):
            for x in (-k, k):
                if x in self:
                    return x
        raise AssertionError("unreachable: non-empty set without element")

    def shift(self, k: int) -> EPSet:
        """The translate ``{x + k : x in self}``."""
        L = self.period
        pos = frozenset((r + k) % L for r in self.pos)
        neg = frozenset((r - k) % L for r in self.neg)
        T = self.threshold + abs(k) + 1
        F = {x + k for x in _members(self, T + abs(k))}
        return ep_normalize(L, pos, neg, T, {x for x in F if -T < x < T})

    def reflect(self) -> EPSet:
        """The mirror image ``{-x : x in self}``."""
        T = self.threshold + 1
        F = {-x for x in _members(self, T)}
        return ep_normalize(self.period, self.neg, self.pos, T, F)

    def dilate(self, radius: int) -> EPSet:
        """``{x : |x - a| < radius for some a}``; empty for radius 0."""
        if radius <= 0 or self.is_empty:
            return EMPTY
        reach = radius - 1
        L = self.period
        pos = frozenset((r + k) % L for r in self.pos for k in range(-reach, reach + 1))
        neg = frozenset((r + k) % L for r in self.neg for k in range(-reach, reach + 1))

        T = self.threshold + reach + 1
        base = _members(self, T + reach)
        F = {x + k for x in base for k in range(-reach, reach + 1)}
        return ep_normalize(L, pos, neg, T, {x for x in F if -T < x < T})

    def scale(self, factor: int) -> EPSet:
        """``{factor * x : x in self}`` for a positive integer factor."""
        if factor <= 0:
            raise ValueError("factor must be positive")
        if factor == 1:
            return self
        return ep_normalize(
            self.period * factor,
            {r * factor for r in self.pos},
            {r * factor for r in self.neg},
            self.threshold * factor,
            {f * factor for f in self.exceptions},
        )

    def residue_atoms(self) -> list[EPSet]:
        """One residue-class tail per end residue; each is unbounded and inside self."""
        L, T = self.period, self.threshold
        atoms = []
        for r in sorted(self.pos):
            atoms.append(ep_normalize(L, {r}, (), T, ()))
        for r in sorted(self.neg):
            atoms.append(ep_normalize(L, (), {r}, T, ()))
        return atoms

    def to_json(self) -> dict:
        return {
            "L": self.period,
            "pos": sorted(self.pos),
            "neg": sorted(self.neg),
            "T": self.threshold,
            "F": sorted(self.exceptions),
        }

    def __repr__(self) -> str:
        return (
            f"EPSet(L={self.period}, pos={sorted(self.pos)}, neg={sorted(self.neg)}, "
            f"T={self.threshold}, F={sorted(self.exceptions)})"
        )

    # convenience constructors

    @classmethod
    def finite(cls, values: Iterable[int]) -> EPSet:
        vals = {int(v) for v in values}
        t = max((abs(v) for v in vals), default=-1) + 1
        return ep_normalize(1, (), (), t, vals)

    @classmethod
    def tail_ap(cls, anchor: int, step: int) -> EPSet:
        """``{anchor + step*k : k >= 0}``."""
        if step <= 0:
            raise ValueError("step must be positive")
        t = abs(anchor) + 1

        def pred(x: int) -> bool:
            return x >= anchor and (x - anchor) % step == 0

        return _from_predicate(pred, step, frozenset({anchor % step}), frozenset(), t)

    @classmethod
    def union_of_aps(cls, aps: Iterable[tuple[int, int]], extra: Iterable[int] = ()) -> EPSet:
        """Union of forward progressions ``(anchor, step)`` and finitely many points."""
        aps = [(int(a), int(d)) for a, d in aps]
        extra = {int(x) for x in extra}
        if any(d <= 0 for _, d in aps):
            raise ValueError("step must be positive")
        T = max([abs(a) + 1 for a, _ in aps] + [abs(x) + 1 for x in extra] + [0])
        L = lcm(*(d for _, d in aps)) if aps else 1
        pos = set()
        F = set(extra)
        for a, d in aps:
            pos.update((a + k * d) % L for k in range(L // d))
            F.update(range(a, T, d))
        return ep_normalize(L, pos, (), T, F)

    @classmethod
    def residue_class(cls, residue: int, modulus: int) -> EPSet:
        """``{x in Z : x = residue mod modulus}``, both ends."""
        r = residue % modulus
        return _from_predicate(
            lambda x: x % modulus == r, modulus, frozenset({r}), frozenset({(-r) % modulus}), 1
        )


def _from_predicate(pred: Callable[[int], bool], L: int, pos, neg, T: int) -> EPSet:
    # caller guarantees pred agrees with the tails for |x| >= T
    F = {x for x in range(-T + 1, T) if pred(x)}
    return ep_normalize(L, pos, neg, T, F)


def ep_normalize(period: int, pos: Iterable[int], neg: Iterable[int], threshold: int, exceptions: Iterable[int]) -> EPSet:
    """Return the canonical representative of the described set."""
    L = int(period)
    T = int(threshold)
    if L <= 0:
        raise ValueError(f"period must be positive, got {L}")
    if T < 0:
        raise ValueError("threshold must be non-negative")
    pos = frozenset(int(r) for r in pos)
    neg = frozenset(int(r) for r in neg)
    F = frozenset(int(x) for x in exceptions)
    for r in pos | neg:
        if not 0 <= r < L:
            raise ValueError(f"residue {r} outside [0, {L})")
    for x in F:
        if not -T < x < T:
            raise ValueError(f"exception {x} outside window (-{T}, {T})")

    new_L = _lcm(_minimal_period(pos, L), _minimal_period(neg, L))
    pos2 = frozenset(r % new_L for r in pos)
    neg2 = frozenset(r % new_L for r in neg)
    if T == 0:
        return EPSet(new_L, pos2, neg2, 0, frozenset())

    # inside the window membership is F; find the last disagreement with the pattern
    def last_disagreement(residues: frozenset[int], window_members: set[int]) -> int:
        pattern = set()
        for r in residues:
            pattern.update(range(r if r >= 1 else new_L, T, new_L))
        return max(window_members ^ pattern, default=-1) + 1

    new_T = max(
        last_disagreement(pos2, {x for x in F if x > 0}),
        last_disagreement(neg2, {-x for x in F if x < 0}),
    )
    if new_T == 0 and (0 in F) != (0 in pos2 or 0 in neg2):
        new_T = 1
    new_F = frozenset(x for x in F if -new_T < x < new_T)
    return EPSet(new_L, pos2, neg2, new_T, new_F)


def _members(a: EPSet, W: int) -> set[int]:
    """Members with ``|x| < W``."""
    out = {x for x in a.exceptions if -W < x < W}
    L, T = a.period, a.threshold
    for r in a.pos:
        out.update(range(T + (r - T) % L, W, L))
    for r in a.neg:
        out.update(-y for y in range(T + (r - T) % L, W, L))
    return out


_OPS = {
    "union": lambda a, b: a or b,
    "inter": lambda a, b: a and b,
    "diff": lambda a, b: a and not b,
    "compl": lambda a, b: not a,
}


def ep_boolean(op: str, a: EPSet, b: EPSet | None = None) -> EPSet:
    """Pointwise Boolean combination of two canonical sets (``b`` unused for compl)."""
    if op not in _OPS:
        raise ValueError(f"unknown operation {op!r}")
    if b is None:
        if op != "compl":
            raise ValueError(f"{op} needs two operands")
        b = EMPTY
    f = _OPS[op]
    L = _lcm(a.period, b.period)
    T = max(a.threshold, b.threshold, 1)
    pos = {r for r in range(L) if f(r % a.period in a.pos, r % b.period in b.pos)}
    neg = {r for r in range(L) if f(r % a.period in a.neg, r % b.period in b.neg)}
    ma, mb = _members(a, T), _members(b, T)
    if op == "union":
        F = ma | mb
    elif op == "inter":
        F = ma & mb
    elif op == "diff":
        F = ma - mb
    else:
        F = set(range(-T + 1, T)) - ma
    return ep_normalize(L, pos, neg, T, F)


def ep_membership(a: EPSet, x: int) -> bool:
    return x in a


def ep_from_json(data: dict) -> EPSet:
    return ep_normalize(data["L"], data["pos"], data["neg"], data["T"], data["F"])


EMPTY = EPSet(1, frozenset(), frozenset(), 0, frozenset())
INTEGERS = EPSet(1, frozenset({0}), frozenset({0}), 0, frozenset())


def iter_nonneg(a: EPSet) -> Iterator[int]:
    """Non-negative members in increasing order."""
    x = 0
    limit = a.threshold
    while True:
        if x >= limit and not a.pos:
            return
        if x in a:
            yield x
        x += 1
