"""Prime sieving, factorization, divisor machinery and the model constants.

Everything downstream (window counts, box volumes, table counts) factors
integers through a smallest-prime-factor table built once per run.  The
model constants (rho, P, lambda) are evaluated in extended precision so
that checks comparing quantities with small margins stay stable to 12
significant digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .errors import CapacityError

# Working precision for the constant evaluations; results are rounded to
# binary64 on the way out.
_MP_DPS = 30

DEFAULT_MEMORY_CAP = 512 * 1024 * 1024


@dataclass(frozen=True)
class SieveTable:
    """Smallest-prime-factor table for 2..limit; immutable after construction."""

    limit: int
    spf: np.ndarray = field(repr=False)

    def smallest_prime_factor(self, n: int) -> int:
        if not 2 <= n <= self.limit:
            raise ValueError(f"n={n} outside sieve range [2, {self.limit}]")
        return int(self.spf[n])


@dataclass(frozen=True)
class Factorization:
    """n as a product of prime powers, primes strictly increasing."""

    n: int
    factors: tuple[tuple[int, int], ...]

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)


@dataclass(frozen=True)
class ModelConstants:
    """k together with rho = (k+1)^(1/k), its log, the exponent P and lambda."""

    k: int
    rho: float
    log_rho: float
    p: float
    lam: float

    def __post_init__(self):
        if not 1.0 < self.p <= 2.0:
            raise ValueError(f"P={self.p} outside (1, 2]")
        if self.lam <= 1.0:
            raise ValueError(f"lambda={self.lam} not > 1")
        if (self.k + 1) * self.log_rho <= 1.0:
            raise ValueError("(k+1) log rho must exceed 1")


@dataclass(frozen=True)
class PrimeBlocks:
    """Greedy maximal prime blocks of reciprocal sum at most log rho.

    bounds[0] is an integer (one less than the first prime >= k+1), every
    later bound is a prime closing its block.  mus[j-1] = log log bounds[j]
    / log rho for j >= 1, and drift[j-1] = mus[j-1] - j.
    """

    k: int
    prime_limit: int
    bounds: tuple[int, ...]
    mus: tuple[float, ...]
    drift: tuple[float, ...]

    @property
    def block_count(self) -> int:
        return len(self.bounds) - 1


def build_sieve(limit: int, memory_cap_bytes: int = DEFAULT_MEMORY_CAP) -> SieveTable:
    """Smallest-prime-factor sieve on [2, limit]."""
    if limit < 2:
        raise ValueError("limit must be >= 2")
    need = 4 * (limit + 1)
    if need > memory_cap_bytes:
        raise CapacityError(
            f"sieve of limit {limit} needs {need} bytes > cap {memory_cap_bytes}"
        )
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            seg = spf[p * p :: p]
            seg[seg == 0] = p
    # untouched entries >= 2 are prime
    rest = np.flatnonzero(spf[2:] == 0) + 2
    spf[rest] = rest
    return SieveTable(limit=limit, spf=spf)


def primes_upto(limit: int) -> np.ndarray:
    """All primes <= limit, ascending (plain Eratosthenes, int64)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


def factorize(n: int, sieve: SieveTable) -> Factorization:
    """Prime-power decomposition of n via the sieve; n=1 gives an empty list."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return Factorization(1, ())
    if n > sieve.limit:
        raise ValueError(f"n={n} exceeds sieve limit {sieve.limit}")
    spf = sieve.spf
    factors = []
    m = n
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        factors.append((p, e))
    return Factorization(n, tuple(factors))


def divisors(f: Factorization) -> list[int]:
    """All divisors of n, ascending."""
    divs = [1]
    for p, e in f.factors:
        pk = 1
        ext = []
        for _ in range(e):
            pk *= p
            ext.extend(d * pk for d in divs)
        divs.extend(ext)
    divs.sort()
    return divs


def divisor_tuple_count(f: Factorization, k: int) -> int:
    """Number of ordered k-tuples (d_1, ..., d_k) with d_1 * ... * d_k dividing n.

    Multiplicative with local factor C(e+k, k); for squarefree n this is
    (k+1)^omega(n).  Raises on results beyond 128 bits, matching the
    configured integer width of the toolkit.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    out = 1
    for _, e in f.factors:
        out *= math.comb(e + k, k)
    if out.bit_length() > 127:
        raise OverflowError("divisor tuple count exceeds 128-bit width")
    return out


def euler_phi(f: Factorization) -> int:
    out = f.n
    for p, _ in f.factors:
        out -= out // p
    return out


def phi_ratio(f: Factorization) -> Fraction:
    """phi(n)/n as an exact rational."""
    out = Fraction(1)
    for p, _ in f.factors:
        out *= Fraction(p - 1, p)
    return out


def omega_above(f: Factorization, k: int) -> int:
    """Number of distinct prime factors exceeding k."""
    return sum(1 for p, _ in f.factors if p > k)


def deviation_rate(u) -> float:
    """The convex rate function u log u - u + 1, evaluated in extended precision."""
    if u <= 0:
        raise ValueError("u must be positive")
    with mpmath.workdps(_MP_DPS):
        x = mpmath.mpf(u.numerator) / u.denominator if isinstance(u, Fraction) else mpmath.mpf(u)
        return float(x * mpmath.log(x) - x + 1)


def model_constants(k: int) -> ModelConstants:
    """rho = (k+1)^(1/k), P = min{2, A/(A-1)} with A = (k+1)^2 log(rho)^2,
    and lambda = (k+1)^P / (k^P + 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    with mpmath.workdps(_MP_DPS):
        rho = mpmath.mpf(k + 1) ** (mpmath.mpf(1) / k)
        log_rho = mpmath.log(rho)
        a = (k + 1) ** 2 * log_rho**2
        p = min(mpmath.mpf(2), a / (a - 1))
        lam = mpmath.mpf(k + 1) ** p / (mpmath.mpf(k) ** p + 1)
        return ModelConstants(
            k=k, rho=float(rho), log_rho=float(log_rho), p=float(p), lam=float(lam)
        )


def prime_blocks(k: int, prime_limit: int) -> PrimeBlocks:
    """Partition the primes greedily into maximal blocks of reciprocal sum
    at most log rho.

    Each emitted bound is certified maximal: the block sum stays at or
    below log rho and admitting the next prime would exceed it.  A final
    block that cannot close below prime_limit is discarded, so short
    outputs are valid.  Admission compares a compensated (Kahan) running
    sum against log rho with no tolerance slack.
    """
    if prime_limit < k + 2:
        raise ValueError("prime_limit must be at least k+2")
    consts = model_constants(k)
    log_rho = consts.log_rho
    primes = primes_upto(prime_limit)
    # first prime >= k+1, minus one
    idx0 = int(np.searchsorted(primes, k + 1, side="left"))
    lam0 = int(primes[idx0]) - 1
    bounds = [lam0]
    i = int(np.searchsorted(primes, lam0, side="right"))
    plist = primes.tolist()
    n_primes = len(plist)
    while i < n_primes:
        s = 0.0
        c = 0.0
        last = -1
        j = i
        closed = False
        while j < n_primes:
            y = 1.0 / plist[j] - c
            t = s + y
            c = (t - s) - y
            if t > log_rho:
                closed = True
                break
            s = t
            last = plist[j]
            j += 1
        if not closed or last < 0:
            # ran out of primes with the block still open: cannot certify
            break
        bounds.append(last)
        i = j
    mus = tuple(math.log(math.log(b)) / log_rho for b in bounds[1:])
    drift = tuple(mu - (j + 1) for j, mu in enumerate(mus))
    return PrimeBlocks(
        k=k, prime_limit=prime_limit, bounds=tuple(bounds), mus=mus, drift=drift
    )
