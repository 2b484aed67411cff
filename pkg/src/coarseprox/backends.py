"""Coarse-structure backends.

Three carriers are supported:

``z-metric``
    The integers with the metric coarse structure, generated by
    ``E_r = {(x, y) : |x - y| < r}``.  Sets are :class:`EPSet`.
``q-halfline``
    The non-negative rationals with the structure generated by finitely many
    half-lines parallel to the diagonal.  Sets are :class:`QSet`.
``windowed``
    The integers with the metric structure, but sets given by arbitrary
    predicates (:class:`GeneratorSet`).  Answers are three-valued and come
    from brute force over a window schedule.

Relations only ever quantify over generator entourages (a radius, or a finite
offset set): every controlled set sits inside a generator and every relation
in this package is monotone in the entourage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Union

import numpy as np

from . import setalg_q as q
from .setalg_q import QSet, to_frac
from .setalg_z import EMPTY as EP_EMPTY
from .setalg_z import INTEGERS, EPSet

__all__ = [
    "SetClassError",
    "EntourageMismatch",
    "Metric",
    "HalfLine",
    "PairPredicate",
    "UnknownAtWindow",
    "Verdict",
    "GeneratorSet",
    "ZMetric",
    "QHalfLine",
    "Windowed",
    "get_backend",
    "bounded",
    "image",
    "entourage_ops",
    "connectivity_check",
]


class SetClassError(TypeError):
    """A set of the wrong class was handed to a backend."""


class EntourageMismatch(ValueError):
    """Entourage operations across different variants."""


# ---------------------------------------------------------------------------
# entourages


@dataclass(frozen=True)
class Metric:
    """``E_r = {(x, y) : |x - y| < r}`` on the integers."""

    radius: int

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be non-negative")

    def contains(self, x: int, y: int) -> bool:
        return abs(x - y) < self.radius

    def to_json(self) -> dict:
        return {"kind": "metric", "r": self.radius}


@dataclass(frozen=True)
class HalfLine:
    """Diagonal plus the half-lines ``{(x, x+c)}`` and ``{(x+c, x)}`` for each offset,
    restricted to pairs whose smaller coordinate is at least ``threshold``."""

    offsets: frozenset[Fraction]
    threshold: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "offsets", frozenset(to_frac(c) for c in self.offsets))
        object.__setattr__(self, "threshold", to_frac(self.threshold))
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")

    @classmethod
    def of(cls, *offsets, threshold=0) -> HalfLine:
        return cls(frozenset(to_frac(c) for c in offsets), to_frac(threshold))

    def symmetric_offsets(self) -> frozenset[Fraction]:
        return frozenset({Fraction(0)} | {c for o in self.offsets for c in (o, -o)})

    def contains(self, x, y) -> bool:
        x, y = to_frac(x), to_frac(y)
        if x == y:
            return True
        return (y - x) in self.symmetric_offsets() and min(x, y) >= self.threshold

    def to_json(self) -> dict:
        return {
            "kind": "halfline",
            "offsets": [str(c) for c in sorted(self.offsets)],
            "t": str(self.threshold),
        }


@dataclass(frozen=True)
class PairPredicate:
    """Entourage given by a pair predicate; ``radius_bound`` caps |x - y| inside it."""

    predicate: Callable[[int, int], bool] = field(compare=False)
    radius_bound: int
    description: str = "pairs"

    def contains(self, x: int, y: int) -> bool:
        return abs(x - y) < self.radius_bound and self.predicate(x, y)

    def to_json(self) -> dict:
        return {"kind": "pairs", "bound": self.radius_bound, "description": self.description}


Entourage = Union[Metric, HalfLine, PairPredicate]


def entourage_ops(op: str, e: Entourage, f: Entourage | None = None) -> Entourage:
    """``compose`` / ``invert`` / ``union`` on generators, returning a generator
    containing the exact result."""
    if op == "invert":
        if isinstance(e, Metric):
            return e
        if isinstance(e, HalfLine):
            return HalfLine(frozenset(-c for c in e.offsets), e.threshold)
        return PairPredicate(lambda x, y: e.predicate(y, x), e.radius_bound, f"inverse({e.description})")
    if f is None:
        raise ValueError(f"{op} needs two entourages")
    if type(e) is not type(f):
        raise EntourageMismatch(f"cannot combine {type(e).__name__} with {type(f).__name__}")
    if op == "union":
        if isinstance(e, Metric):
            return Metric(max(e.radius, f.radius))
        if isinstance(e, HalfLine):
            return HalfLine(e.offsets | f.offsets, min(e.threshold, f.threshold))
        return PairPredicate(
            lambda x, y: e.contains(x, y) or f.contains(x, y),
            max(e.radius_bound, f.radius_bound),
            f"union({e.description}, {f.description})",
        )
    if op == "compose":
        if isinstance(e, Metric):
            return Metric(e.radius + f.radius)
        if isinstance(e, HalfLine):
            sums = {a + b for a in e.symmetric_offsets() for b in f.symmetric_offsets()}
            return HalfLine(frozenset(c for c in sums if c > 0), min(e.threshold, f.threshold))
        bound = e.radius_bound + f.radius_bound

        def pred(x, y):
            return any(e.contains(x, z) and f.contains(z, y) for z in range(x - e.radius_bound, x + e.radius_bound + 1))

        return PairPredicate(pred, bound, f"compose({e.description}, {f.description})")
    raise ValueError(f"unknown entourage operation {op!r}")


# ---------------------------------------------------------------------------
# windowed sets


@dataclass(frozen=True)
class UnknownAtWindow:
    """No verdict could be reached with probes up to ``window``."""

    window: int

    def to_json(self) -> dict:
        return {"unknown_at_window": self.window}


Verdict = Union[bool, UnknownAtWindow]


@dataclass(frozen=True)
class GeneratorSet:
    """Subset of the integers given by a membership predicate.

    ``enumerator`` (optional) yields the members ordered by ``(|x|, x)``; a
    finite enumerator marks the set as certainly finite.
    """

    predicate: Callable[[int], bool] = field(compare=False)
    description: str = "set"
    enumerator: Callable[[], Iterator[int]] | None = field(default=None, compare=False)
    mask_fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __contains__(self, x: int) -> bool:
        return bool(self.predicate(int(x)))

    def enumerate(self) -> Iterator[int]:
        if self.enumerator is not None:
            yield from self.enumerator()
            return
        k = 0
        while True:
            for x in ((0,) if k == 0 else (-k, k)):
                if self.predicate(x):
                    yield x
            k += 1

    def mask(self, lo: int, hi: int) -> np.ndarray:
        """Boolean membership array for lo..hi inclusive."""
        xs = np.arange(lo, hi + 1, dtype=np.int64)
        if self.mask_fn is not None:
            return self.mask_fn(xs)
        return np.fromiter((self.predicate(int(x)) for x in xs), dtype=bool, count=len(xs))

    @classmethod
    def from_epset(cls, a: EPSet, description: str | None = None) -> GeneratorSet:
        pos = np.array(sorted(a.pos), dtype=np.int64)
        neg = np.array(sorted(a.neg), dtype=np.int64)
        exc = np.array(sorted(a.exceptions), dtype=np.int64)
        L, T = a.period, a.threshold

        def mask_fn(xs):
            m = (xs >= T) & np.isin(xs % L, pos)
            m |= (xs <= -T) & np.isin((-xs) % L, neg)
            m |= np.isin(xs, exc)
            return m

        enumerator = None
        if a.is_finite:
            def enumerator():
                return iter(sorted(a.exceptions, key=lambda x: (abs(x), x)))

        return cls(a.__contains__, description or repr(a), enumerator, mask_fn)

    @classmethod
    def from_sequence(cls, fn: Callable[[int], int], description: str) -> GeneratorSet:
        """Image of a strictly increasing non-negative sequence ``fn(0) < fn(1) < ...``."""

        def enumerator():
            n = 0
            while True:
                yield fn(n)
                n += 1

        def predicate(x: int) -> bool:
            for v in enumerator():
                if v >= x:
                    return v == x
            return False  # pragma: no cover

        return cls(predicate, description, enumerator)


# ---------------------------------------------------------------------------
# backends


class ZMetric:
    name = "z-metric"
    set_type = EPSet

    def check(self, *sets) -> None:
        for s in sets:
            if not isinstance(s, EPSet):
                raise SetClassError(f"z-metric backend expects EPSet, got {type(s).__name__}")

    def bounded(self, a: EPSet) -> bool:
        # finite diameter <=> finite on the integers
        self.check(a)
        return a.is_finite

    def image(self, e: Metric, a: EPSet) -> EPSet:
        self.check(a)
        if not isinstance(e, Metric):
            raise EntourageMismatch("z-metric takes Metric entourages")
        return a.dilate(e.radius)

    def complement(self, a: EPSet) -> EPSet:
        return ~a

    @property
    def universe(self) -> EPSet:
        return INTEGERS

    @property
    def empty(self) -> EPSet:
        return EP_EMPTY

    def point(self, x=0) -> EPSet:
        return EPSet.finite([int(x)])

    def finite(self, values) -> EPSet:
        return EPSet.finite(values)

    def covering_entourage(self, x: int, y: int) -> Metric:
        return Metric(abs(int(x) - int(y)) + 1)

    def serialize(self, a: EPSet) -> dict:
        return a.to_json()


class QHalfLine:
    name = "q-halfline"
    set_type = QSet

    def check(self, *sets) -> None:
        for s in sets:
            if not isinstance(s, QSet):
                raise SetClassError(f"q-halfline backend expects QSet, got {type(s).__name__}")

    def bounded(self, a: QSet) -> bool:
        # bounded sets of the half-line structure are exactly the finite ones
        self.check(a)
        return a.is_finite

    def image(self, e: HalfLine, a: QSet) -> QSet:
        self.check(a)
        if not isinstance(e, HalfLine):
            raise EntourageMismatch("q-halfline takes HalfLine entourages")
        t = e.threshold
        upper = a.restrict_from(t)
        parts = [a]
        for c in sorted({abs(c) for c in e.offsets if c != 0}):
            parts += [upper.shift(c), a.shift(-c).restrict_from(t)]
        return q.q_union_all(parts)

    def complement(self, a: QSet) -> QSet:
        return ~a

    @property
    def universe(self) -> QSet:
        return q.ALL

    @property
    def empty(self) -> QSet:
        return q.EMPTY

    def point(self, x=0) -> QSet:
        return QSet.finite([x])

    def finite(self, values) -> QSet:
        return QSet.finite(values)

    def covering_entourage(self, x, y) -> HalfLine:
        return HalfLine.of(to_frac(y) - to_frac(x))

    def serialize(self, a: QSet) -> dict:
        return a.to_json()


class Windowed:
    """Brute-force semi-decision backend over the integers."""

    name = "windowed"
    set_type = GeneratorSet

    def __init__(self, windows: Iterable[int] = (100, 1000), max_radius: int = 10):
        self.windows = tuple(sorted(int(w) for w in windows))
        self.max_radius = int(max_radius)

    def check(self, *sets) -> None:
        for s in sets:
            if not isinstance(s, GeneratorSet):
                raise SetClassError(f"windowed backend expects GeneratorSet, got {type(s).__name__}")

    def bounded(self, a: GeneratorSet) -> Verdict:
        self.check(a)
        W = self.windows[-1]
        if a.enumerator is None:
            return UnknownAtWindow(W)
        for x in a.enumerator():
            if abs(x) > W:
                return UnknownAtWindow(W)
        return True

    def image(self, e, a: GeneratorSet) -> GeneratorSet:
        self.check(a)
        if isinstance(e, Metric):
            reach = e.radius - 1
            if reach < 0:
                return self.empty

            def pred(x):
                return any(a.predicate(x + k) for k in range(-reach, reach + 1))

            def mask_fn(xs):
                lo, hi = int(xs[0]), int(xs[-1])
                base = a.mask(lo - reach, hi + reach)
                out = np.zeros(len(xs), dtype=bool)
                for k in range(2 * reach + 1):
                    out |= base[k : k + len(xs)]
                return out

            return GeneratorSet(pred, f"E_{e.radius}[{a.description}]", None, mask_fn)
        if isinstance(e, PairPredicate):
            b = e.radius_bound

            def pred(x):
                return any(e.contains(x, y) and a.predicate(y) for y in range(x - b, x + b + 1))

            return GeneratorSet(pred, f"{e.description}[{a.description}]")
        raise EntourageMismatch("windowed backend takes Metric or PairPredicate entourages")

    def complement(self, a: GeneratorSet) -> GeneratorSet:
        mask_fn = None
        if a.mask_fn is not None:
            mask_fn = lambda xs: ~a.mask_fn(xs)  # noqa: E731
        return GeneratorSet(lambda x: not a.predicate(x), f"compl({a.description})", None, mask_fn)

    @property
    def universe(self) -> GeneratorSet:
        return GeneratorSet(lambda x: True, "Z", None, lambda xs: np.ones(len(xs), dtype=bool))

    @property
    def empty(self) -> GeneratorSet:
        return GeneratorSet(lambda x: False, "empty", lambda: iter(()), lambda xs: np.zeros(len(xs), dtype=bool))

    def point(self, x=0) -> GeneratorSet:
        return GeneratorSet.from_epset(EPSet.finite([int(x)]))

    def finite(self, values) -> GeneratorSet:
        return GeneratorSet.from_epset(EPSet.finite(values))

    def covering_entourage(self, x: int, y: int) -> Metric:
        return Metric(abs(int(x) - int(y)) + 1)

    def serialize(self, a: GeneratorSet) -> dict:
        return {"description": a.description}


Backend = Union[ZMetric, QHalfLine, Windowed]


def get_backend(name: str, **kwargs) -> Backend:
    if name == "z-metric":
        return ZMetric()
    if name == "q-halfline":
        return QHalfLine()
    if name == "windowed":
        return Windowed(**kwargs)
    raise ValueError(f"unknown backend {name!r}")


def bounded(backend: Backend, a) -> Verdict:
    return backend.bounded(a)


def image(backend: Backend, e: Entourage, a):
    return backend.image(e, a)


def connectivity_check(backend: Backend, pairs: Iterable[tuple]) -> bool:
    """Every probe pair lies in some constructible generator."""
    for x, y in pairs:
        e = backend.covering_entourage(x, y)
        if not e.contains(x, y):
            return False
    return True
