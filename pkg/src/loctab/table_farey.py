"""Exact multiplication-table counts and Farey sum-set cardinalities.

The table count A(k, N) = |{n_1 * ... * n_(k+1) : n_i <= N}| is computed
by ordered enumeration (n_1 <= ... <= n_(k+1), innermost factor
vectorized) into a deduplicating registry.  Two registry backings exist:
a packed bitset over [1, N^(k+1)] when N^(k+1)/8 bytes fit the memory
cap, and sorted unique chunks spilled to temporary files otherwise.  The
final cardinality is independent of the backing.

Farey sum-set sizes are computed twice: directly, by summing tuples of
reduced fractions mod 1 with exact rational arithmetic, and through the
pairwise-coprime-product characterization, by summing Euler phi over the
admissible denominators.
"""

from __future__ import annotations

import math
import os
import tempfile
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from .arith import DEFAULT_MEMORY_CAP, deviation_rate, model_constants, primes_upto
from .errors import CapacityError

DEFAULT_FAREY_CAP = 10**7

_BIT_MASKS = (np.uint8(1) << np.arange(8, dtype=np.uint8)).astype(np.uint8)


class BitsetRegistry:
    """Packed-bit membership over [0, capacity]; duplicates are harmless."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.bits = np.zeros(capacity // 8 + 1, dtype=np.uint8)

    def add_array(self, values: np.ndarray) -> None:
        np.bitwise_or.at(self.bits, values >> 3, _BIT_MASKS[values & 7])

    def count(self) -> int:
        return int(np.unpackbits(self.bits).sum())

    def values(self) -> np.ndarray:
        return np.flatnonzero(np.unpackbits(self.bits, bitorder="little")).astype(np.int64)


class SortedChunkRegistry:
    """Deduplicates through sorted unique chunks spilled to temporary files."""

    def __init__(self, capacity: int, chunk_elems: int = 1 << 20):
        self.capacity = capacity
        self.chunk_elems = max(chunk_elems, 1 << 12)
        self._pending: list[np.ndarray] = []
        self._pending_size = 0
        self._dir = tempfile.TemporaryDirectory(prefix="loctab-registry-")
        self._files: list[str] = []

    def add_array(self, values: np.ndarray) -> None:
        self._pending.append(values)
        self._pending_size += values.size
        if self._pending_size >= self.chunk_elems:
            self._spill()

    def _spill(self) -> None:
        if not self._pending:
            return
        chunk = np.unique(np.concatenate(self._pending))
        path = os.path.join(self._dir.name, f"chunk{len(self._files)}.npy")
        np.save(path, chunk)
        self._files.append(path)
        self._pending = []
        self._pending_size = 0

    def count(self) -> int:
        return self.values().size

    def values(self) -> np.ndarray:
        self._spill()
        acc = np.empty(0, dtype=np.int64)
        for path in self._files:
            acc = np.union1d(acc, np.load(path))
        return acc


def make_registry(capacity: int, memory_cap_bytes: int = DEFAULT_MEMORY_CAP, backing: str = "auto"):
    """Pick the registry backing: bitset when capacity/8 bytes fit the cap."""
    if backing == "auto":
        backing = "bitset" if capacity // 8 + 1 <= memory_cap_bytes else "chunks"
    if backing == "bitset":
        if capacity // 8 + 1 > memory_cap_bytes:
            raise CapacityError(
                f"bitset of {capacity // 8 + 1} bytes exceeds cap {memory_cap_bytes}"
            )
        return BitsetRegistry(capacity)
    if backing == "chunks":
        # chunk sizing keeps the in-flight int64 buffers well under the cap
        return SortedChunkRegistry(capacity, chunk_elems=max(memory_cap_bytes // 64, 1 << 12))
    raise ValueError(f"unknown backing {backing!r}")


def _ordered_products(k: int, n_top: int, registry) -> None:
    """Insert every product n_1 * ... * n_(k+1) with n_1 <= ... <= n_(k+1) <= N."""

    def rec(prefix: int, start: int, depth: int) -> None:
        if depth == k:  # innermost factor vectorized
            tail = np.arange(start, n_top + 1, dtype=np.int64)
            registry.add_array(prefix * tail)
            return
        for n in range(start, n_top + 1):
            rec(prefix * n, n, depth + 1)

    rec(1, 1, 0)


def table_count(
    k: int,
    n_top: int,
    memory_cap_bytes: int = DEFAULT_MEMORY_CAP,
    backing: str = "auto",
) -> int:
    """Exact number of distinct products of k+1 factors, each at most N."""
    if n_top < 1 or k < 1:
        raise ValueError("need N >= 1 and k >= 1")
    capacity = n_top ** (k + 1)
    if capacity >= 2**62:
        raise CapacityError("N^(k+1) exceeds the vectorized 64-bit product range")
    registry = make_registry(capacity, memory_cap_bytes, backing)
    _ordered_products(k, n_top, registry)
    return registry.count()


def product_set(k: int, n_top: int, memory_cap_bytes: int = DEFAULT_MEMORY_CAP) -> np.ndarray:
    """The sorted distinct products themselves (for totient sums over them)."""
    capacity = n_top ** (k + 1)
    if capacity >= 2**62:
        raise CapacityError("N^(k+1) exceeds the vectorized 64-bit product range")
    registry = make_registry(capacity, memory_cap_bytes)
    _ordered_products(k, n_top, registry)
    return registry.values()


def normalized_ratio(k: int, n_top: int, table: int) -> float:
    """table * (log N)^Q(1/log rho) * (log log N)^(3/2) / N^(k+1).

    The quantity the table-count magnitude statement says is bounded
    between positive k-dependent constants; exposed raw, trend checks
    operate on ratios of consecutive values.
    """
    if n_top < 16:
        raise ValueError("N must be at least 16 so that log log N is safely positive")
    consts = model_constants(k)
    q = deviation_rate(1 / consts.log_rho)
    ln = math.log(n_top)
    return table * ln**q * math.log(ln) ** 1.5 / n_top ** (k + 1)


def farey_fractions(r_top: int) -> list[Fraction]:
    """Reduced fractions b/r mod 1 with 1 <= b <= r <= R; b = r gives 0."""
    out = {Fraction(0)}
    for r in range(2, r_top + 1):
        for b in range(1, r):
            if math.gcd(b, r) == 1:
                out.add(Fraction(b, r))
    return sorted(out)


def farey_sumset_size_direct(kp1: int, r_top: int, cap: int = DEFAULT_FAREY_CAP) -> int:
    """|{f_1 + ... + f_kp1 mod 1}| over Farey fractions of order R, by
    exhaustive enumeration with exact rational arithmetic.

    Sums are symmetric, so multisets of summands are enumerated; every
    sum is reduced mod 1 at each addition (gcd normalization is implicit
    in Fraction).
    """
    if kp1 < 2:
        raise ValueError("need at least two summands")
    fracs = farey_fractions(r_top)
    if len(fracs) ** kp1 > cap:
        raise CapacityError(f"{len(fracs)}^{kp1} tuples exceed cap {cap}")
    sums = set()
    for combo in combinations_with_replacement(fracs, kp1):
        acc = Fraction(0)
        for f in combo:
            acc = (acc + f) % 1
        sums.add(acc)
    return len(sums)


def _coprime_product_set(kp1: int, r_top: int) -> set[int]:
    """Distinct products r_1 * ... * r_kp1 with r_i <= R pairwise coprime."""
    out: set[int] = set()

    def rec(start: int, left: int, prod: int, chosen: tuple[int, ...]) -> None:
        if left == 0:
            out.add(prod)
            return
        for r in range(start, r_top + 1):
            # gcd(r, r) = r also rules out repeating any factor > 1
            if all(math.gcd(r, c) == 1 for c in chosen if c > 1):
                rec(r, left - 1, prod * r, (*chosen, r))

    rec(1, kp1, 1, ())
    return out


def _phi_table(limit: int) -> np.ndarray:
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in primes_upto(limit):
        phi[p::p] -= phi[p::p] // p
    return phi


def farey_sumset_size_by_products(kp1: int, r_top: int, cap: int = DEFAULT_FAREY_CAP) -> int:
    """Same cardinality through the characterization: sum of phi(r) over the
    distinct pairwise-coprime products of kp1 factors each at most R."""
    if r_top**kp1 > cap:
        raise CapacityError(f"product range {r_top ** kp1} exceeds cap {cap}")
    admissible = _coprime_product_set(kp1, r_top)
    phi = _phi_table(max(admissible))
    return int(sum(phi[r] for r in admissible))


def totient_sum_over_products(kp1: int, r_top: int, memory_cap_bytes: int = DEFAULT_MEMORY_CAP) -> int:
    """Sum of phi(r) over the full table product set (no coprimality)."""
    values = product_set(kp1 - 1, r_top, memory_cap_bytes)
    phi = _phi_table(int(values[-1]))
    return int(phi[values].sum())
