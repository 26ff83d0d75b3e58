"""Localized divisor-tuple counts and the window hit-counting functions.

A window is a k-tuple of half-open intervals (y_i, z_i] with exact
rational endpoints.  An integer n "hits" the window if some ordered
k-tuple of divisors (d_1, ..., d_k) has d_1 * ... * d_k | n and every
d_i inside its interval.  Because the d_i are integers, membership in
(y, z] is the exact integer test floor(y) < d <= floor(z); floors of
rationals are exact, so the half-open boundary semantics are bit-exact.
"""

from __future__ import annotations

import enum
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .arith import Factorization, SieveTable, divisors, factorize, phi_ratio


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        # exact binary value of the float; pass Fraction/int for exact decimals
        return Fraction(x)
    raise TypeError(f"window bound of unsupported type {type(x)!r}")


@dataclass(frozen=True)
class Window:
    """k half-open intervals (y_i, z_i] with exact rational endpoints."""

    lows: tuple[Fraction, ...]
    highs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.lows) != len(self.highs):
            raise ValueError("lows and highs must have equal length")
        if not self.lows:
            raise ValueError("window must have at least one coordinate")

    @property
    def k(self) -> int:
        return len(self.lows)

    @classmethod
    def of(cls, lows, highs) -> "Window":
        lo = tuple(_as_fraction(x) for x in lows)
        hi = tuple(_as_fraction(x) for x in highs)
        return cls(lo, hi)

    @classmethod
    def dyadic(cls, lows) -> "Window":
        """Intervals (y_i, 2 y_i], the doubling convention."""
        lo = tuple(_as_fraction(x) for x in lows)
        return cls(lo, tuple(2 * y for y in lo))

    def integer_cuts(self) -> list[tuple[int, int]]:
        """Per coordinate the integer range [lo, hi] equal to (y, z] ∩ Z."""
        return [
            (math.floor(y) + 1, math.floor(z))
            for y, z in zip(self.lows, self.highs)
        ]

    def permuted(self, perm: tuple[int, ...]) -> "Window":
        return Window(
            tuple(self.lows[i] for i in perm), tuple(self.highs[i] for i in perm)
        )


class CountMode(enum.Enum):
    ALL = "all"
    SQUAREFREE = "squarefree"
    PHI_WEIGHTED_HALF_DYADIC = "phi_weighted_half_dyadic"


def window_tuple_count(n: int, w: Window, sieve: SieveTable) -> int:
    """Exact number of ordered tuples (d_1, ..., d_k) with d_1...d_k | n and
    d_i in (y_i, z_i] for every i."""
    cuts = w.integer_cuts()
    return _count_tuples(factorize(n, sieve), cuts, sieve)


def _window_divisors(m: int, lo: int, hi: int, sieve: SieveTable) -> list[int]:
    if hi < lo or hi < 1 or m < lo:
        return []
    divs = divisors(factorize(m, sieve))
    return divs[bisect_left(divs, lo) : bisect_right(divs, hi)]


def _count_tuples(f: Factorization, cuts, sieve: SieveTable) -> int:
    lo, hi = cuts[0]
    cands = _window_divisors(f.n, lo, hi, sieve)
    if len(cuts) == 1:
        return len(cands)
    return sum(
        _count_tuples(factorize(f.n // d, sieve), cuts[1:], sieve) for d in cands
    )


def has_window_tuple(n: int, w: Window, sieve: SieveTable) -> bool:
    """True iff window_tuple_count(n, w) >= 1, with early exit.

    Recursively assigns d_1 | n inside the first interval and recurses on
    n/d_1; candidates are tried in descending order (a heuristic only,
    correctness does not depend on it).
    """
    return _has_tuple(n, w.integer_cuts(), sieve)


def _has_tuple(m: int, cuts, sieve: SieveTable) -> bool:
    lo, hi = cuts[0]
    cands = _window_divisors(m, lo, hi, sieve)
    if len(cuts) == 1:
        return bool(cands)
    return any(_has_tuple(m // d, cuts[1:], sieve) for d in reversed(cands))


def window_hit_count(x, w: Window, mode: CountMode, sieve: SieveTable):
    """Count (or weigh) the n <= x that admit a divisor tuple in the window.

    ALL counts every such n <= x; SQUAREFREE restricts to squarefree n;
    PHI_WEIGHTED_HALF_DYADIC sums phi(n)/n over squarefree n in (x/2, x]
    and returns the sum as a float (accumulated exactly as a rational
    first, so the result is independent of iteration order).
    """
    x = _as_fraction(x)
    top = math.floor(x)
    if top > sieve.limit:
        raise ValueError(f"x={float(x)} exceeds sieve limit {sieve.limit}")
    cuts = w.integer_cuts()
    if mode is CountMode.PHI_WEIGHTED_HALF_DYADIC:
        lo_excl = x / 2
        total = Fraction(0)
        for n in range(1, top + 1):
            if n <= lo_excl:
                continue
            f = factorize(n, sieve)
            if not f.is_squarefree:
                continue
            if _has_tuple(n, cuts, sieve):
                total += phi_ratio(f)
        return float(total)
    count = 0
    for n in range(1, top + 1):
        if mode is CountMode.SQUAREFREE and not factorize(n, sieve).is_squarefree:
            continue
        if _has_tuple(n, cuts, sieve):
            count += 1
    return count


@dataclass(frozen=True)
class SandwichBounds:
    """lower <= table <= upper_sum is the two-sided table-count check."""

    lower: int
    table: int
    upper_sum: int

    @property
    def holds(self) -> bool:
        return self.lower <= self.table <= self.upper_sum


def sandwich_check(k: int, n_top: int, sieve: SieveTable, *, memory_cap_bytes=None) -> SandwichBounds:
    """Evaluate both sides of the dyadic sandwich around the table count.

    lower  = hit count at x = N^(k+1)/2^k with intervals (N/2, N];
    upper  = sum of hit counts over all dyadic shrinkings (N/2^(m+1), N/2^m]
             with 2^(m_i) <= N, at x = N^(k+1)/2^(m_1+...+m_k).
    """
    from .table_farey import table_count  # local import, avoids a cycle

    if n_top < 1:
        raise ValueError("N must be >= 1")
    cap = n_top ** (k + 1)
    if cap > sieve.limit:
        raise ValueError(f"N^(k+1)={cap} exceeds sieve limit {sieve.limit}")
    nf = Fraction(n_top)
    lower_w = Window.of([nf / 2] * k, [nf] * k)
    lower = window_hit_count(Fraction(cap, 2**k), lower_w, CountMode.ALL, sieve)
    kwargs = {} if memory_cap_bytes is None else {"memory_cap_bytes": memory_cap_bytes}
    table = table_count(k, n_top, **kwargs)
    m_max = n_top.bit_length() - 1  # largest m with 2^m <= N
    upper = 0
    for ms in _tuples(m_max + 1, k):
        x = Fraction(cap, 2 ** sum(ms))
        w = Window.of(
            [nf / 2 ** (m + 1) for m in ms], [nf / 2**m for m in ms]
        )
        upper += window_hit_count(x, w, CountMode.ALL, sieve)
    return SandwichBounds(lower=lower, table=table, upper_sum=upper)


def _tuples(base: int, k: int):
    if k == 0:
        yield ()
        return
    for head in range(base):
        for rest in _tuples(base, k - 1):
            yield (head, *rest)
