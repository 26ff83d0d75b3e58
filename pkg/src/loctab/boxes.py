"""Divisor boxes, their union volume, and the crowding-moment machinery.

Each ordered k-tuple (d_1, ..., d_k) with d_1 * ... * d_k | a owns the
half-open box [log(d_1/2), log d_1) x ... x [log(d_k/2), log d_k).  The
union volume is the Klee measure of the box collection; it is computed on
the exact-rational corner grid (breakpoints are the values d/2 and d) so
no cell is ever misclassified, and floating point enters only in the
final log-width products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import (
    Factorization,
    SieveTable,
    divisor_tuple_count,
    factorize,
    omega_above,
)
from .errors import CapacityError

DEFAULT_ENUMERATION_CAP = 10**7
GRID_CELL_CAP = 10**8


@dataclass(frozen=True)
class DivisorBoxSet:
    """Upper corners (d_1, ..., d_k), one per ordered divisor k-tuple of a."""

    k: int
    corners: tuple[tuple[int, ...], ...]


def divisor_boxes(f: Factorization, k: int, cap: int = DEFAULT_ENUMERATION_CAP) -> DivisorBoxSet:
    """Enumerate the ordered divisor k-tuples of a as box corners.

    Exponents of each prime power are distributed over k slots plus a
    remainder, so every tuple appears exactly once and the count equals
    divisor_tuple_count(a, k).  Duplicate corner tuples cannot arise, but
    the union-volume code would tolerate them anyway.
    """
    count = divisor_tuple_count(f, k)
    if count > cap:
        raise CapacityError(f"{count} divisor tuples exceed cap {cap}")
    corners = [(1,) * k]
    for p, e in f.factors:
        new = []
        for expos in _exponent_splits(e, k):
            mults = tuple(p**x for x in expos)
            for c in corners:
                new.append(tuple(ci * mi for ci, mi in zip(c, mults)))
        corners = new
    return DivisorBoxSet(k=k, corners=tuple(corners))


def _exponent_splits(e: int, k: int):
    """All k-tuples of nonnegative exponents summing to at most e."""
    if k == 1:
        for x in range(e + 1):
            yield (x,)
        return
    for x in range(e + 1):
        for rest in _exponent_splits(e - x, k - 1):
            yield (x, *rest)


def union_volume(b: DivisorBoxSet) -> float:
    """Klee measure of the box union via full coordinate compression."""
    k = b.k
    axes_breaks = []
    for axis in range(k):
        vals = set()
        for c in b.corners:
            d = c[axis]
            vals.add(Fraction(d, 2))
            vals.add(Fraction(d))
        axes_breaks.append(sorted(vals))
    sizes = [len(br) - 1 for br in axes_breaks]
    cells = 1
    for s in sizes:
        cells *= max(s, 1)
    if cells > GRID_CELL_CAP:
        raise CapacityError(f"compressed grid of {cells} cells exceeds cap")
    index = [{v: i for i, v in enumerate(br)} for br in axes_breaks]
    occ = np.zeros(sizes, dtype=bool)
    for c in b.corners:
        sl = tuple(
            slice(index[a][Fraction(c[a], 2)], index[a][Fraction(c[a])])
            for a in range(k)
        )
        occ[sl] = True
    weights = [
        np.array(
            [_log_fraction(br[i + 1]) - _log_fraction(br[i]) for i in range(len(br) - 1)]
        )
        for br in axes_breaks
    ]
    acc = occ.astype(np.float64)
    for w in reversed(weights):
        acc = acc.dot(w)
    return float(acc)


def _log_fraction(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def merged_interval_volume(b: DivisorBoxSet) -> float:
    """Independent 1-D oracle: sort the intervals and merge overlaps."""
    if b.k != 1:
        raise ValueError("merge oracle is one-dimensional")
    ivals = sorted((Fraction(c[0], 2), Fraction(c[0])) for c in b.corners)
    total = 0.0
    cur_lo, cur_hi = ivals[0]
    for lo, hi in ivals[1:]:
        if lo <= cur_hi:
            cur_hi = max(cur_hi, hi)
        else:
            total += _log_fraction(cur_hi) - _log_fraction(cur_lo)
            cur_lo, cur_hi = lo, hi
    total += _log_fraction(cur_hi) - _log_fraction(cur_lo)
    return total


def crowding_moment(
    f: Factorization, k: int, p: float, cap: int = DEFAULT_ENUMERATION_CAP
) -> float:
    """Sum over divisor tuples d of (# tuples d' within a factor of 2 of d
    in every coordinate)^(p-1).

    The two-sided strict condition d_i/2 < d'_i < 2 d_i is decided by exact
    integer cross-multiplication; counts are taken first and the real power
    p-1 is applied once per term.
    """
    if p <= 1:
        raise ValueError("exponent must exceed 1")
    box = divisor_boxes(f, k, cap)
    d = np.array(box.corners, dtype=np.int64)  # shape (T, k)
    # d'_i > d_i/2  <=>  2 d'_i > d_i ; and d'_i < 2 d_i
    close = (2 * d[None, :, :] > d[:, None, :]) & (d[None, :, :] < 2 * d[:, None, :])
    counts = close.all(axis=2).sum(axis=1)
    return float(np.sum(np.power(counts.astype(np.float64), p - 1.0)))


@dataclass(frozen=True)
class HolderBound:
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1 + 1e-9)


def holder_bound_check(
    a_set, k: int, p: float, sieve: SieveTable, cap: int = DEFAULT_ENUMERATION_CAP
) -> HolderBound:
    """Interpolation bound joining tuple counts, union volumes and crowding
    moments over a finite set of integers:

        sum tau/a  <=  ((log 2)^-k sum L/a)^(1-1/P) * (sum W/a)^(1/P)
    """
    a_list = sorted(set(a_set))
    if not a_list:
        raise ValueError("the set must be nonempty")
    lhs = 0.0
    vol_sum = 0.0
    crowd_sum = 0.0
    for a in a_list:
        f = factorize(a, sieve)
        lhs += divisor_tuple_count(f, k) / a
        vol_sum += union_volume(divisor_boxes(f, k, cap)) / a
        crowd_sum += crowding_moment(f, k, p, cap) / a
    rhs = (vol_sum / math.log(2) ** k) ** (1 - 1 / p) * crowd_sum ** (1 / p)
    return HolderBound(lhs=lhs, rhs=rhs)


def smooth_squarefree(t: int, a_max: int, primes) -> list[tuple[int, tuple[int, ...]]]:
    """All squarefree a <= a_max with every prime factor <= t, ascending,
    paired with their (sorted) prime supports.  Exhaustive below a_max."""
    usable = [int(p) for p in primes if p <= t]
    out = [(1, ())]

    def rec(value, start, support):
        for i in range(start, len(usable)):
            p = usable[i]
            nv = value * p
            if nv > a_max:
                break
            out.append((nv, (*support, p)))
            rec(nv, i + 1, (*support, p))

    rec(1, 0, ())
    out.sort()
    return out


@dataclass(frozen=True)
class SmoothVolumeSum:
    """Truncated sum of L(a)/a over squarefree t-smooth a <= a_max.

    A lower bound of the untruncated series; the truncation point is part
    of the record and no extrapolation is ever applied.
    """

    k: int
    t: int
    a_max: int
    total: float
    by_omega: dict[int, float]


def smooth_volume_sum(
    k: int,
    t: int,
    a_max: int,
    sieve: SieveTable,
    primes,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> SmoothVolumeSum:
    """Accumulate L(a)/a over the smooth squarefree stream, grouped by the
    number of prime factors exceeding k; terms are combined in ascending-a
    order so the result is reproducible."""
    if a_max > sieve.limit:
        raise CapacityError(f"a_max={a_max} exceeds sieve limit {sieve.limit}")
    total = 0.0
    by_omega: dict[int, float] = {}
    for a, _support in smooth_squarefree(t, a_max, primes):
        f = factorize(a, sieve)
        term = union_volume(divisor_boxes(f, k, cap)) / a
        r = omega_above(f, k)
        total += term
        by_omega[r] = by_omega.get(r, 0.0) + term
    return SmoothVolumeSum(k=k, t=t, a_max=a_max, total=total, by_omega=by_omega)
