"""Brute-force window oracles for the closed-form decision rules.

Nothing here looks at ends, residues or part structure.  The integer oracle
scans membership arrays; the half-line oracle scans a rational grid
``k / M`` fine enough to contain every point named by the data plus a
generic extra denominator.  On the integers evidence is gathered in the
annulus ``W/2 < |x| <= W`` so that finite data near the origin cannot fake
an unbounded answer; on the half-line, where bounded means finite, the
oracle instead watches a point count grow.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np

from .backends import GeneratorSet, UnknownAtWindow, Verdict, Windowed
from .relations import b_rel, lambda_rel
from .setalg_q import QSet, _next_prime_above
from .setalg_z import EPSet

__all__ = [
    "z_oracle_b",
    "z_oracle_prec",
    "z_oracle_lambda",
    "q_grid_mask",
    "q_oracle_b",
    "q_oracle_prec",
]


def _z_window_backend(windows, *sets: EPSet) -> Windowed:
    radius = max([10] + [s.period + 1 for s in sets])
    return Windowed(windows=windows, max_radius=radius)


def _gen(a: EPSet) -> GeneratorSet:
    return GeneratorSet.from_epset(a)


def z_oracle_b(a: EPSet, b: EPSet, windows=(100, 1000)) -> Verdict:
    bk = _z_window_backend(windows, a, b)
    return b_rel(bk, _gen(a), _gen(b)).verdict


def z_oracle_prec(a: EPSet, b: EPSet, windows=(100, 1000)) -> Verdict:
    bk = _z_window_backend(windows, a, b)
    found = b_rel(bk, _gen(a), bk.complement(_gen(b))).verdict
    return found if isinstance(found, UnknownAtWindow) else not found


def z_oracle_lambda(a: EPSet, b: EPSet, windows=(100, 1000)) -> Verdict:
    bk = _z_window_backend(windows, a, b)
    return lambda_rel(bk, _gen(a), _gen(b)).verdict


# ---------------------------------------------------------------------------
# half-line grid


def q_grid_mask(s: QSet, M: int, kmax: int) -> np.ndarray:
    """Membership of ``k / M`` for ``k = 0..kmax``; M must clear every denominator of s."""
    ks = np.arange(kmax + 1, dtype=np.int64)
    inside = np.zeros(kmax + 1, dtype=bool)
    for iv in s.I:
        lo = iv.lo * M
        if lo.denominator != 1:
            raise ValueError("grid too coarse for interval endpoint")
        m = ks > lo.numerator if iv.lo_open else ks >= lo.numerator
        if iv.hi is not None:
            hi = iv.hi * M
            if hi.denominator != 1:
                raise ValueError("grid too coarse for interval endpoint")
            m &= ks < hi.numerator if iv.hi_open else ks <= hi.numerator
        inside |= m
    den, ep = s.delta._lattice
    on_lattice = (ks * den) % M == 0
    j = (ks * den) // M
    toggled = on_lattice & GeneratorSet.from_epset(ep).mask_fn(j)
    return inside ^ toggled


def _q_data_scale(*sets: QSet) -> tuple[int, int]:
    dens, scale = [1], Fraction(1)
    for s in sets:
        for iv in s.I:
            dens.append(iv.lo.denominator)
            scale = max(scale, iv.lo)
            if iv.hi is not None:
                dens.append(iv.hi.denominator)
                scale = max(scale, iv.hi)
        d = s.delta.canonical()
        dens.append(s.delta.den)
        for p in d.aps:
            scale = max(scale, p.anchor + p.step)
        for x in d.extra:
            scale = max(scale, x)
    D = lcm(*dens)
    return D * _next_prime_above(D), int(scale) + 2


def _strided_dilate(m: np.ndarray, stride: int, reach: int) -> np.ndarray:
    """``out[k] = any(m[k + j*stride] for |j| <= reach)``, via prefix sums per residue."""
    n = len(m)
    rows = -(-n // stride)
    grid = np.zeros(rows * stride, dtype=np.int64)
    grid[:n] = m
    grid = grid.reshape(rows, stride)
    csum = np.vstack([np.zeros((1, stride), dtype=np.int64), np.cumsum(grid, axis=0)])
    idx = np.arange(rows)
    hi = np.minimum(idx + reach + 1, rows)
    lo = np.maximum(idx - reach, 0)
    out = (csum[hi] - csum[lo]) > 0
    return out.reshape(-1)[:n]


def _q_meet_count(a: QSet, b: QSet, M: int, refine: int, reach: int, W: int, complement_b: bool) -> int:
    """Grid points ``k/(M*refine) <= W`` of ``E_S[A] & B`` with ``S = {j/M : |j| <= reach*M}``."""
    G = M * refine
    ma = q_grid_mask(a, G, (W + reach) * G)
    mb = q_grid_mask(b, G, W * G)
    if complement_b:
        mb = ~mb
    near = _strided_dilate(ma, refine, reach * M)[: W * G + 1]
    return int(np.count_nonzero(near & mb))


def q_oracle_b(a: QSet, b: QSet, windows=(100, 1000), complement_b: bool = False) -> Verdict:
    """Grow the probe two ways, by refining the grid and by widening the window.

    A finite intersection is already fully visible on the coarse grid inside
    the small window, so its count cannot change; an infinite one contains an
    interval piece (seen by refinement) or an unbounded discrete tail (seen by
    widening).  Every endpoint, offset and discrete point lies on the coarse
    grid, so all sets involved are constant on open coarse cells and halving
    the step is enough to see interior.
    """
    M, reach = _q_data_scale(a, b)
    refine = 2
    w1, w2 = min(windows), max(windows)
    base = _q_meet_count(a, b, M, 1, reach, w1, complement_b)
    finer = _q_meet_count(a, b, M, refine, reach, w1, complement_b)
    wider = _q_meet_count(a, b, M, 1, reach, w2, complement_b)
    return finer > base or wider > base


def q_oracle_prec(a: QSet, b: QSet, windows=(100, 1000)) -> Verdict:
    found = q_oracle_b(a, b, windows, complement_b=True)
    return found if isinstance(found, UnknownAtWindow) else not found
