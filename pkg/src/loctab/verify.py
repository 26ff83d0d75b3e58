"""One-shot verification: every module's property suite behind one entry point.

Each suite returns the number of checks it ran plus a list of failure
descriptions (inputs included, so failures reproduce).  All randomness
is drawn from generators keyed off the configured seed, and report text
carries no timestamps, so a rerun with the same config produces
byte-identical output.
"""

from __future__ import annotations

import bisect
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import boxes as bx
from . import orderstats as osx
from . import table_farey as tf
from . import tuples as tp
from .arith import (
    build_sieve,
    deviation_rate,
    divisor_tuple_count,
    divisors,
    factorize,
    model_constants,
    prime_blocks,
    primes_upto,
)
from .config import RunConfig
from .errors import CapacityError
from .localized import CountMode, Window, has_window_tuple, sandwich_check, window_hit_count, window_tuple_count

SIEVE_WORK_LIMIT = 200_000


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    capacity_error: str | None = None

    @property
    def passed(self) -> bool:
        return not self.failures and self.capacity_error is None

    def check(self, ok: bool, detail: str) -> None:
        self.checks += 1
        if not ok:
            self.failures.append(detail)


@dataclass(frozen=True)
class Resources:
    cfg: RunConfig
    sieve: object
    primes: np.ndarray


def build_resources(cfg: RunConfig) -> Resources:
    sieve = build_sieve(min(cfg.sieve_limit, SIEVE_WORK_LIMIT), cfg.memory_cap_bytes)
    primes = primes_upto(min(cfg.sieve_limit, 10**7))
    return Resources(cfg=cfg, sieve=sieve, primes=primes)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


# ----------------------------------------------------------------------


def suite_arith(res: Resources) -> SuiteResult:
    out = SuiteResult("arith-core")
    sieve = res.sieve
    rng = random.Random(res.cfg.mc_seed ^ 0xA1)
    for n in range(1, 10**5 + 1):
        f = factorize(n, sieve)
        prod = 1
        for p, e in f.factors:
            prod *= p**e
        if prod != n:
            out.failures.append(f"factorize({n}) product {prod}")
    out.checks += 10**5
    for _ in range(300):
        n = rng.randint(1, 10**4)
        divs = divisors(factorize(n, sieve))
        out.check(divs == sorted(set(divs)), f"divisors({n}) not sorted/unique")
        a, b = rng.choice(divs), rng.choice(divs)
        out.check(n % math.gcd(a, b) == 0 and math.gcd(a, b) in divs,
                  f"divisors({n}) not gcd-closed at ({a},{b})")
    # multiplicativity on random coprime pairs
    done = 0
    while done < 200:
        a, b = rng.randint(1, 10**4), rng.randint(1, 10**4)
        if math.gcd(a, b) != 1 or a * b > sieve.limit:
            continue
        k = rng.randint(1, 4)
        ta = divisor_tuple_count(factorize(a, sieve), k)
        tb = divisor_tuple_count(factorize(b, sieve), k)
        tab = divisor_tuple_count(factorize(a * b, sieve), k)
        out.check(tab == ta * tb, f"tuple count not multiplicative at ({a},{b},k={k})")
        done += 1
    for a in range(1, 10**4 + 1):
        f = factorize(a, sieve)
        if not f.is_squarefree:
            continue
        for k in range(1, 5):
            out.check(
                divisor_tuple_count(f, k) == (k + 1) ** f.omega,
                f"squarefree count mismatch a={a} k={k}",
            )
    # greedy prime blocks: maximality re-checked with an independent sum
    prime_limit = int(res.primes[-1]) if len(res.primes) else 2
    plist = res.primes.tolist()
    for k in (1, 2, 3):
        consts = model_constants(k)
        blocks = prime_blocks(k, prime_limit)
        out.notes.append(
            f"prime blocks k={k}: bounds={blocks.bounds} drift="
            + "[" + ", ".join(_fmt(d) for d in blocks.drift) + "]"
        )
        bounds = blocks.bounds
        for j in range(1, len(bounds)):
            i0 = bisect.bisect_right(plist, bounds[j - 1])
            i1 = bisect.bisect_right(plist, bounds[j])
            block = [1.0 / p for p in plist[i0:i1]]
            s = math.fsum(block)
            out.check(s <= consts.log_rho, f"k={k} block {j} sum {s} exceeds log rho")
            out.check(
                i1 >= len(plist) or s + 1.0 / plist[i1] > consts.log_rho,
                f"k={k} block {j} not maximal",
            )
        diffs = [abs(blocks.drift[i + 1] - blocks.drift[i]) for i in range(len(blocks.drift) - 1)]
        out.check(
            all(diffs[i + 1] <= diffs[i] for i in range(len(diffs) - 1)),
            f"k={k} drift steps not decreasing: {diffs}",
        )
    # spot prefixes
    b1 = prime_blocks(1, prime_limit).bounds
    b2 = prime_blocks(2, prime_limit).bounds
    out.check(b1[:3] == (1, 2, 7), f"k=1 block bounds {b1[:3]}")
    out.check(b2[:2] == (2, 5), f"k=2 block bounds {b2[:2]}")
    return out


# ----------------------------------------------------------------------


def _random_window(rng: random.Random, k: int) -> Window:
    lows = []
    highs = []
    for _ in range(k):
        y = Fraction(rng.randint(2, 240), rng.randint(1, 6))
        width = Fraction(rng.randint(11, 40), 10)
        lows.append(y)
        highs.append(y * width)
    return Window.of(lows, highs)


def bruteforce_window_count(n: int, w: Window, sieve) -> int:
    """Independent oracle: filter the divisors into each interval and test
    every ordered tuple's product for divisibility directly."""
    divs = divisors(factorize(n, sieve))
    cands = []
    for lo, hi in zip(w.lows, w.highs):
        cands.append([d for d in divs if lo < d <= hi])
    count = 0

    def rec(i: int, prod: int) -> None:
        nonlocal count
        if i == len(cands):
            count += n % prod == 0
            return
        for d in cands[i]:
            if prod * d <= n:
                rec(i + 1, prod * d)

    rec(0, 1)
    return count


def product_sieve_hit_count(x, w: Window, sieve) -> int:
    """Independent oracle for integer x: mark multiples of every in-window
    divisor-tuple product and count marked n <= x."""
    top = math.floor(x)
    cuts = w.integer_cuts()
    hits = np.zeros(top + 1, dtype=bool)

    def rec(i: int, prod: int) -> None:
        if prod > top:
            return
        if i == len(cuts):
            hits[prod::prod] = True
            return
        lo, hi = cuts[i]
        for d in range(max(lo, 1), hi + 1):
            if prod * d > top:
                break
            rec(i + 1, prod * d)

    rec(0, 1)
    return int(hits.sum())


def suite_localized(res: Resources) -> SuiteResult:
    out = SuiteResult("localized-count")
    sieve = res.sieve
    rng = random.Random(res.cfg.mc_seed ^ 0xB2)
    for k in (1, 2, 3):
        for _ in range(4):
            w = _random_window(rng, k)
            for n in range(1, 5001):
                cnt = window_tuple_count(n, w, sieve)
                has = has_window_tuple(n, w, sieve)
                if (cnt >= 1) != has:
                    out.failures.append(f"has/count disagree n={n} k={k} w={w}")
            out.checks += 5000
    # monotonicity under window enlargement
    for _ in range(40):
        k = rng.randint(1, 3)
        w = _random_window(rng, k)
        w2 = Window.of(
            [lo - Fraction(rng.randint(0, 3), 3) for lo in w.lows],
            [hi + Fraction(rng.randint(0, 3), 3) for hi in w.highs],
        )
        n = rng.randint(1, 5000)
        out.check(
            window_tuple_count(n, w, sieve) <= window_tuple_count(n, w2, sieve),
            f"enlarging window decreased count at n={n}",
        )
    # mode comparisons on dyadic windows
    for _ in range(20):
        k = rng.randint(1, 2)
        y = [Fraction(rng.randint(2, 20)) for _ in range(k)]
        w = Window.dyadic(y)
        x = rng.randint(20, 400)
        all_c = window_hit_count(x, w, CountMode.ALL, sieve)
        sq_c = window_hit_count(x, w, CountMode.SQUAREFREE, sieve)
        wt = window_hit_count(x, w, CountMode.PHI_WEIGHTED_HALF_DYADIC, sieve)
        out.check(sq_c <= all_c, f"squarefree count exceeds plain count at x={x}")
        out.check(wt <= all_c + 1e-12, f"weighted sum exceeds count at x={x}")
    # permutation symmetry
    for _ in range(40):
        k = rng.randint(2, 3)
        w = _random_window(rng, k)
        perm = list(range(k))
        rng.shuffle(perm)
        n = rng.randint(1, 5000)
        out.check(
            window_tuple_count(n, w, sieve)
            == window_tuple_count(n, w.permuted(tuple(perm)), sieve),
            f"permutation changed count at n={n} perm={perm}",
        )
    # hit counts against the product-sieve oracle on integer windows
    for _ in range(25):
        k = rng.randint(1, 2)
        lows = [Fraction(rng.randint(1, 12)) for _ in range(k)]
        w = Window.of(lows, [lo + rng.randint(1, 6) for lo in lows])
        x = rng.randint(10, 2000)
        mine = window_hit_count(x, w, CountMode.ALL, sieve)
        oracle = product_sieve_hit_count(x, w, sieve)
        out.check(mine == oracle, f"hit count {mine} != sieve oracle {oracle} at x={x} w={w}")
    # the sandwich, exact at every tested size
    for k, n_max in ((1, 64), (2, 16)):
        for n in range(1, n_max + 1):
            s = sandwich_check(k, n, sieve, memory_cap_bytes=res.cfg.memory_cap_bytes)
            out.check(
                s.lower <= s.table <= s.upper_sum,
                f"sandwich violated at k={k} N={n}: {s}",
            )
    return out


# ----------------------------------------------------------------------


def suite_boxes(res: Resources) -> SuiteResult:
    out = SuiteResult("box-measure")
    sieve = res.sieve
    cfg = res.cfg
    rng = random.Random(cfg.mc_seed ^ 0xC3)
    log2 = math.log(2)
    facts = {a: factorize(a, sieve) for a in range(1, 3001)}
    squarefree = [a for a, f in facts.items() if f.is_squarefree]
    vol = {}
    for k in (1, 2, 3):
        for a in squarefree:
            vol[(k, a)] = bx.union_volume(bx.divisor_boxes(facts[a], k, cfg.enumeration_cap))
    # upper bounds, both forms, plus the trivial lower bound
    for k in (1, 2, 3):
        for a in squarefree:
            f = facts[a]
            v = vol[(k, a)]
            tau = divisor_tuple_count(f, k)
            cap_a = min(tau * log2**k, (math.log(a) + log2) ** k)
            out.check(v <= cap_a + 1e-9, f"volume cap (a) fails a={a} k={k}: {v} > {cap_a}")
            out.check(v >= log2**k - 1e-12, f"volume floor fails a={a} k={k}")
            primes = f.primes()
            m = len(primes)
            if m:
                best = min(
                    (k + 1) ** (m - j) * (math.log(math.prod(primes[:j])) + log2) ** k
                    for j in range(1, m + 1)
                )
                out.check(v <= best + 1e-9, f"prefix cap (c) fails a={a} k={k}")
    # submultiplicativity on random coprime squarefree pairs
    done = 0
    while done < 300:
        a = rng.choice(squarefree)
        b = rng.choice(squarefree)
        if a * b > 3000 or math.gcd(a, b) != 1:
            continue
        k = rng.randint(1, 3)
        lhs = vol[(k, a * b)]
        rhs = divisor_tuple_count(facts[a], k) * vol[(k, b)]
        out.check(lhs <= rhs + 1e-9, f"submultiplicativity fails a={a} b={b} k={k}")
        done += 1
    # 1-D merge oracle, every a up to 3000
    for a in range(1, 3001):
        b1 = bx.divisor_boxes(facts[a], 1, cfg.enumeration_cap)
        v = bx.union_volume(b1)
        ref = bx.merged_interval_volume(b1)
        out.check(
            abs(v - ref) <= 1e-12 * max(ref, 1.0),
            f"merge oracle mismatch a={a}: {v} vs {ref}",
        )
    # 2-D Monte Carlo rejection sampling over the bounding box
    mc_rng = np.random.Generator(np.random.Philox(key=cfg.mc_seed ^ 0xC4))
    samples = 10**6
    for a in sorted(rng.sample(range(2, 3001), 50)):
        box = bx.divisor_boxes(facts[a], 2, cfg.enumeration_cap)
        v = bx.union_volume(box)
        lo = np.array(
            [[math.log(c[0]) - log2, math.log(c[1]) - log2] for c in box.corners]
        )
        hi = np.array([[math.log(c[0]), math.log(c[1])] for c in box.corners])
        bb_lo = lo.min(axis=0)
        bb_hi = hi.max(axis=0)
        area = float(np.prod(bb_hi - bb_lo))
        hits = 0
        done_s = 0
        while done_s < samples:
            m = min(1 << 17, samples - done_s)
            pts = mc_rng.random((m, 2)) * (bb_hi - bb_lo) + bb_lo
            inside = ((pts[:, None, :] >= lo[None, :, :]) & (pts[:, None, :] < hi[None, :, :])).all(
                axis=2
            ).any(axis=1)
            hits += int(inside.sum())
            done_s += m
        p = hits / samples
        est = p * area
        se = math.sqrt(max(p * (1 - p), 1e-12) / samples) * area
        out.check(
            abs(est - v) <= 4 * se,
            f"2-D MC volume off a={a}: grid {v}, mc {est} +- {se}",
        )
    # interpolation bound: worked instance, then random sets
    hb = bx.holder_bound_check([1, 2, 3, 6], 1, 2.0, sieve)
    out.check(abs(hb.lhs - 10 / 3) < 1e-12, f"worked instance lhs {hb.lhs}")
    out.check(abs(hb.rhs - 3.4596) < 5e-4, f"worked instance rhs {hb.rhs}")
    small_sf = [a for a in squarefree if a <= 1000]
    for i in range(200):
        size = rng.randint(1, 10)
        a_set = rng.sample(small_sf, size)
        k = rng.randint(1, 3)
        p = 1.0 + rng.random()  # (1, 2]
        if p <= 1.0:
            p = 2.0
        chk = bx.holder_bound_check(a_set, k, p, sieve)
        out.check(chk.holds, f"interpolation bound fails set={sorted(a_set)} k={k} P={p}")
    # smooth sums: spot values and the floor
    s = bx.smooth_volume_sum(1, 2, 10, sieve, res.primes)
    out.check(abs(s.total - 2 * log2) < 1e-12, f"smooth sum spot value {s.total}")
    s1 = bx.smooth_volume_sum(1, 1, 50, sieve, res.primes)
    out.check(abs(s1.total - log2) < 1e-12, f"smooth sum t=1 {s1.total}")
    for k in (1, 2):
        sk = bx.smooth_volume_sum(k, 7, 2000, sieve, res.primes)
        out.check(sk.total >= log2**k, f"smooth sum below floor k={k}")
        out.notes.append(
            f"smooth sum k={k} t=7 a<=2000: total={_fmt(sk.total)} by_omega="
            + str({r: float(f'{v:.6g}') for r, v in sorted(sk.by_omega.items())})
        )
    return out


# ----------------------------------------------------------------------


def suite_table_farey(res: Resources) -> SuiteResult:
    out = SuiteResult("table-farey")
    cfg = res.cfg
    for kp1, r_max in ((2, 30), (3, 12)):
        for r in range(1, r_max + 1):
            d = tf.farey_sumset_size_direct(kp1, r)
            c = tf.farey_sumset_size_by_products(kp1, r)
            out.check(d == c, f"farey routes disagree kp1={kp1} R={r}: {d} vs {c}")
    out.check(tf.farey_sumset_size_direct(2, 2) == 2, "farey spot value R=2")
    out.check(tf.farey_sumset_size_direct(2, 3) == 6, "farey spot value R=3")
    # the totient-sum chain between the farey size and the table count
    for kp1 in (2, 3):
        for r in range(1, 21):
            fr = tf.farey_sumset_size_direct(kp1, r)
            mid = tf.totient_sum_over_products(kp1, r, cfg.memory_cap_bytes)
            table = tf.table_count(kp1 - 1, r, cfg.memory_cap_bytes)
            out.check(
                fr <= mid <= r**kp1 * table,
                f"totient chain fails kp1={kp1} R={r}: {fr}, {mid}, {r ** kp1 * table}",
            )
    # monotone growth with the coarse per-step cap
    for k, n_max in ((1, 64), (2, 16)):
        prev_a = None
        for n in range(1, n_max + 1):
            a = tf.table_count(k, n, cfg.memory_cap_bytes)
            if prev_a is not None:
                out.check(
                    prev_a <= a <= prev_a + (k + 1) * n**k,
                    f"growth cap fails k={k} N={n}",
                )
            prev_a = a
    # backing equivalence at moderate sizes (the big ones live in acceptance)
    for k, n in ((1, 256), (2, 32)):
        b1 = tf.table_count(k, n, cfg.memory_cap_bytes, backing="bitset")
        b2 = tf.table_count(k, n, memory_cap_bytes=1 << 16, backing="chunks")
        out.check(b1 == b2, f"backings disagree k={k} N={n}: {b1} vs {b2}")
    out.check(tf.table_count(1, 4) == 9, "table spot value A(1,4)")
    out.check(tf.table_count(2, 2) == 4, "table spot value A(2,2)")
    return out


# ----------------------------------------------------------------------


def suite_tuples(res: Resources) -> SuiteResult:
    out = SuiteResult("tuple-combinatorics")
    rng = random.Random(res.cfg.mc_seed ^ 0xD4)
    cap = res.cfg.enumeration_cap
    for b_max, k in ((5, 1), (3, 2)):
        for b in range(1, b_max + 1):
            tuples_all = list(tp.disjoint_tuples(b, k, cap))
            out.check(len(tuples_all) == (k + 1) ** b, f"tuple count B={b} k={k}")
            for cut in _all_cutoffs(b, k):
                for y in tuples_all:
                    m1 = tp.suffix_match_count(y, cut, b, k)
                    m2 = tp.suffix_match_count_bruteforce(y, cut, b, k, cap)
                    if m1 != m2:
                        out.failures.append(
                            f"count identity fails B={b} k={k} Y={y} I={cut}: {m1} vs {m2}"
                        )
                out.checks += len(tuples_all)
            for y in tuples_all:
                out.check(
                    tp.suffix_match_count(y, (b,) * k, b, k) == (k + 1) ** b,
                    f"vacuous cutoffs B={b} k={k}",
                )
                out.check(tp.suffix_match_count(y, (0,) * k, b, k) >= 1, "count below 1")
    # unique-union equivalences
    for _ in range(300):
        n = rng.randint(1, 4)
        b = rng.randint(1, 8)
        ys = _random_disjoint(rng, b, n)
        zs = _random_disjoint(rng, b, n)
        lhs = tp.unique_union([y ^ z for y, z in zip(ys, zs)]) == frozenset()
        rhs = frozenset().union(*ys) == frozenset().union(*zs)
        out.check(lhs == rhs, f"unique-union equivalence fails ys={ys} zs={zs}")
    out.check(tp.unique_union([]) == frozenset(), "empty unique union")
    out.check(
        tp.unique_union([{1, 2}, {2, 3}]) == frozenset({1, 3}), "symmetric difference"
    )
    # block index
    c = tp.Composition((2, 0, 1))
    out.check([tp.block_index(c, i) for i in (0, 1, 2, 3)] == [0, 1, 1, 3], "block index")
    # moment bound, exhaustive over cutoffs
    for b_max, k in ((5, 1), (3, 2)):
        for b in range(1, b_max + 1):
            for p in (1.25, 1.5, 2.0):
                for cut in _all_cutoffs(b, k):
                    mb = tp.suffix_moment_bound(b, k, p, cut, cap)
                    out.check(
                        mb.holds, f"moment bound fails B={b} k={k} P={p} I={cut}"
                    )
    mb0 = tp.suffix_moment_bound(2, 1, 2.0, (0,), cap)
    out.check(abs(mb0.lhs - 4) < 1e-9 and abs(mb0.rhs - 4) < 1e-9, "equality at I=0")
    mbB = tp.suffix_moment_bound(2, 1, 2.0, (2,), cap)
    out.check(abs(mbB.lhs - 16) < 1e-9 and abs(mbB.rhs - 16) < 1e-9, "equality at I=B")
    # beyond the proven exponent range: reported, never asserted
    worst = 0.0
    for cut in _all_cutoffs(3, 1):
        mb = tp.suffix_moment_bound(3, 1, 3.0, cut, cap)
        worst = max(worst, mb.lhs / mb.rhs)
    out.notes.append(f"moment bound at P=3 (B=3, k=1): max lhs/rhs = {_fmt(worst)}")
    # permutation invariance of the count multiset, exhaustive at B<=3, k=2
    for b in range(1, 4):
        tuples_all = list(tp.disjoint_tuples(b, 2, cap))
        for cut in _all_cutoffs(b, 2):
            base = sorted(tp.suffix_match_count(y, cut, b, 2) for y in tuples_all)
            perm = sorted(
                tp.suffix_match_count((y[1], y[0]), cut, b, 2) for y in tuples_all
            )
            out.check(base == perm, f"permutation invariance fails B={b} I={cut}")
    # positivity margin of the gap function
    for k in range(2, 11):
        gm = tp.moment_gap_margin(k)
        out.check(gm.min_value > 0, f"gap margin nonpositive at k={k}: {gm.min_value}")
        out.check(abs(gm.at_zero) < 1e-9, f"gap f(0) != 0 at k={k}")
        out.check(abs(gm.at_k) < 1e-6, f"gap f(k) != 0 at k={k}")
    gm2 = tp.moment_gap_margin(2)
    out.check(abs(gm2.min_value - 0.1364514657) < 1e-6, f"gap spot value {gm2.min_value}")
    return out


def _all_cutoffs(b: int, k: int):
    return list(product(range(b + 1), repeat=k))


def _random_disjoint(rng: random.Random, b: int, n: int):
    sets = [set() for _ in range(n)]
    for x in range(1, b + 1):
        slot = rng.randint(0, n)
        if slot:
            sets[slot - 1].add(x)
    return [frozenset(s) for s in sets]


# ----------------------------------------------------------------------


def suite_orderstats(res: Resources) -> SuiteResult:
    out = SuiteResult("order-stats")
    cfg = res.cfg
    rng = random.Random(cfg.mc_seed ^ 0xE5)
    # the two exact routes agree, random rational thresholds
    for _ in range(200):
        r = rng.randint(1, 6)
        vals = sorted(Fraction(rng.randint(-2, 12), 12) for _ in range(r))
        t = osx.ThresholdVector.of(vals)
        v1 = osx.simplex_volume_exact(t)
        v2 = osx.simplex_volume_occupancy(t)
        out.check(v1 == v2, f"exact routes disagree at {t}: {v1} vs {v2}")
    # ballot probability: spot values and monotonicity
    out.check(osx.ballot_probability(1, 2, 2) == Fraction(3, 4), "ballot spot Q(1,2;2)")
    out.check(osx.ballot_probability(Fraction(1, 2), 1, 1) == Fraction(1, 2), "ballot spot Q(1/2,1;1)")
    for r in range(1, 9):
        prev_u = None
        for u2 in range(0, 2 * r + 3):
            q = osx.ballot_probability(Fraction(u2, 2), r, r)
            if prev_u is not None:
                out.check(q >= prev_u, f"ballot not monotone in u at r={r} u={u2 / 2}")
            prev_u = q
        prev_v = None
        for v2 in range(1, 2 * r + 3):
            q = osx.ballot_probability(1, Fraction(v2, 2), r)
            if prev_v is not None:
                out.check(q >= prev_v, f"ballot not monotone in v at r={r} v={v2 / 2}")
            prev_v = q
        out.check(osx.ballot_probability(r, 1, r) == 1, f"ballot u>=r at r={r}")
    # indicator identically one gives the ambient volume exactly
    for r in range(1, 6):
        est = osx.mc_region_volume(
            osx.PartialSumRegion(mu=2.0, r=r, v=1.0, gamma=float(r + 2)), 10**3, cfg.mc_seed
        )
        out.check(
            est.estimate == 1.0 / math.factorial(r) and est.stderr == 0.0,
            f"trivial region not exact at r={r}",
        )
    # MC agrees with the exact ballot probabilities
    for r in range(1, 9):
        u = rng.randint(1, r)
        q = float(osx.ballot_probability(u, r + 1 - u, r))
        t = osx.ThresholdVector.from_line(u, r + 1 - u, r)
        est = osx.mc_region_volume(osx.ThresholdRegion(t.thresholds), 10**5, cfg.mc_seed ^ r)
        exact_vol = q / math.factorial(r)
        tol = 4 * est.stderr if est.stderr else 1e-9
        out.check(
            abs(est.estimate - exact_vol) <= tol,
            f"MC vs exact ballot r={r} u={u}: {est.estimate} vs {exact_vol}",
        )
    # exact lower bound rows
    for row in osx.ballot_lower_bound_rows(12):
        out.check(row.holds, f"ballot lower bound fails r={row.r} u={row.u}")
    # staircase volumes: floor check plus the ordered-simplex ceiling
    lam_by_k = {k: model_constants(k).lam for k in (1, 2)}
    rows = osx.staircase_floor_rows(
        8, cfg.mc_samples, cfg.mc_seed ^ 0xF0, lam_by_k, n_exp=cfg.yb_n, floor=cfg.yb_floor
    )
    for row in rows:
        out.check(
            row.holds,
            f"staircase floor fails k={row.k} B={row.b} N={row.n_exp}: "
            f"{_fmt(row.scaled)} +- {_fmt(row.scaled_stderr)} < {row.floor}",
        )
        out.check(
            row.scaled <= (row.b + 1) + 4 * row.scaled_stderr,
            f"staircase volume above simplex ceiling k={row.k} B={row.b}",
        )
        out.notes.append(
            f"staircase k={row.k} B={row.b} N={row.n_exp}: scaled={_fmt(row.scaled)}"
        )
    # clump envelope: F <= 1 so the integral is below the simplex volume
    for k in (1, 2):
        rows = osx.clump_envelope_rows(k, 4, 10**5, cfg.mc_seed ^ 0xF1, r_values=(1, 2, 4, 8))
        for row in rows:
            out.check(
                row.estimate <= 1.0 / math.factorial(row.r) + 4 * row.stderr,
                f"envelope above 1/r! at k={k} r={row.r} v={row.v}",
            )
            out.check(
                row.within(50.0),
                f"envelope ratio above ceiling k={k} r={row.r} v={row.v}: {row.ratio}",
            )
    est0 = osx.mc_region_volume(osx.ClumpEnvelope(r=0, v=1.0, k=1, rho=2.0), 10**3, cfg.mc_seed)
    out.check(est0.estimate == 1.0, "empty envelope integral")
    # partial-sum envelope, small grid
    grid = [(r, v, g) for r in (1, 2, 4) for v in (1, 2) for g in (0, 1, 2)]
    for k in (1, 2):
        mu = model_constants(k).rho
        rows = osx.partial_sum_envelope_rows(mu, grid, 10**5, cfg.mc_seed ^ 0xF2)
        for row in rows:
            out.check(
                row.within(50.0),
                f"partial-sum envelope above ceiling mu={_fmt(row.mu)} r={row.r} "
                f"v={row.v} gamma={row.gamma}: {_fmt(row.scaled)}",
            )
    return out


# ----------------------------------------------------------------------

SUITES = (
    suite_arith,
    suite_localized,
    suite_boxes,
    suite_table_farey,
    suite_tuples,
    suite_orderstats,
)


def run_verify(cfg: RunConfig) -> tuple[str, int]:
    """Run every suite; return (report text, exit code 0/1/2)."""
    lines = [
        "loctab verification run",
        f"config: k={cfg.k} sieve_limit={cfg.sieve_limit} memory_cap_bytes={cfg.memory_cap_bytes}",
        f"        mc_samples={cfg.mc_samples} mc_seed={cfg.mc_seed} yb_n={cfg.yb_n} "
        f"yb_floor={cfg.yb_floor} enumeration_cap={cfg.enumeration_cap}",
        "",
    ]
    results = []
    capacity_failure = False
    try:
        res = build_resources(cfg)
    except CapacityError as exc:
        lines.append(f"[FAIL] resources: capacity error: {exc}")
        lines.append("SUITES total=0 passed=0")
        return "\n".join(lines) + "\n", 2
    for fn in SUITES:
        try:
            result = fn(res)
        except CapacityError as exc:
            result = SuiteResult(fn.__name__.replace("suite_", ""))
            result.capacity_error = str(exc)
        results.append(result)
    passed = 0
    for r in results:
        if r.capacity_error is not None:
            if cfg.allow_skips:
                lines.append(f"[SKIP] {r.name}: capacity: {r.capacity_error}")
            else:
                lines.append(f"[FAIL] {r.name}: capacity: {r.capacity_error}")
                capacity_failure = True
            continue
        if r.passed:
            passed += 1
            lines.append(f"[PASS] {r.name}: {r.checks} checks")
        else:
            lines.append(
                f"[FAIL] {r.name}: {len(r.failures)} of {r.checks} checks failed; "
                f"first: {r.failures[0]}"
            )
        for note in r.notes:
            lines.append(f"       note: {note}")
    total_counted = sum(1 for r in results if r.capacity_error is None or not cfg.allow_skips)
    lines.append(f"SUITES total={total_counted} passed={passed}")
    text = "\n".join(lines) + "\n"
    if capacity_failure:
        return text, 2
    if passed != total_counted:
        return text, 1
    return text, 0
