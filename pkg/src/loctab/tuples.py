"""Disjoint set-tuple combinatorics behind the squarefree divisor model.

A "set tuple" is a k-tuple of pairwise disjoint subsets of {1, ..., B};
elements in no subset implicitly carry the label 0.  There are (k+1)^B
such tuples.  suffix_match_count counts the tuples Z that agree with a
fixed Y on every suffix union beyond per-condition cutoffs; it is
evaluated both by exhaustive enumeration and by a closed block-product
formula, and the two routes must agree everywhere.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import product

from .errors import CapacityError

DEFAULT_TUPLE_CAP = 10**7


def disjoint_tuples(b: int, k: int, cap: int = DEFAULT_TUPLE_CAP):
    """Yield every k-tuple of pairwise disjoint subsets of {1, ..., B}.

    Each element of {1, ..., B} independently takes a label in {0, ..., k};
    label 0 means "in no subset".  Exactly (k+1)^B tuples are produced.
    """
    if (k + 1) ** b > cap:
        raise CapacityError(f"(k+1)^B = {(k + 1) ** b} exceeds cap {cap}")
    for labels in product(range(k + 1), repeat=b):
        yield tuple(
            frozenset(i + 1 for i, lab in enumerate(labels) if lab == j)
            for j in range(1, k + 1)
        )


def unique_union(sets) -> frozenset:
    """Elements covered by exactly one of the given sets.

    Empty input gives the empty set; two sets give their symmetric
    difference.
    """
    cover = Counter()
    for s in sets:
        cover.update(s)
    return frozenset(x for x, c in cover.items() if c == 1)


@dataclass(frozen=True)
class Composition:
    """Nonnegative block sizes with their prefix sums."""

    parts: tuple[int, ...]

    def __post_init__(self):
        if any(p < 0 for p in self.parts):
            raise ValueError("parts must be nonnegative")

    @property
    def prefix(self) -> tuple[int, ...]:
        out = [0]
        for p in self.parts:
            out.append(out[-1] + p)
        return tuple(out)

    @property
    def total(self) -> int:
        return sum(self.parts)


def block_index(c: Composition, i: int) -> int:
    """The unique E with prefix[E-1] < i <= prefix[E]; 0 when i = 0."""
    if i == 0:
        return 0
    pre = c.prefix
    if not 1 <= i <= pre[-1]:
        raise ValueError(f"index {i} outside [0, {pre[-1]}]")
    for e in range(1, len(pre)):
        if pre[e] >= i:
            return e
    raise AssertionError("unreachable")


def _suffix_union(sets, j: int, cutoff: int, b: int) -> frozenset:
    out = set()
    for s in sets[j - 1 :]:
        out.update(x for x in s if cutoff < x <= b)
    return frozenset(out)


def suffix_match_count_bruteforce(y, cutoffs, b: int, k: int, cap: int = DEFAULT_TUPLE_CAP) -> int:
    """Count Z agreeing with Y on all k suffix unions above the cutoffs,
    by full enumeration of the (k+1)^B tuples."""
    targets = [_suffix_union(y, j, cutoffs[j - 1], b) for j in range(1, k + 1)]
    count = 0
    for z in disjoint_tuples(b, k, cap):
        if all(
            _suffix_union(z, j, cutoffs[j - 1], b) == targets[j - 1]
            for j in range(1, k + 1)
        ):
            count += 1
    return count


def suffix_match_count(y, cutoffs, b: int, k: int) -> int:
    """Closed-form block product equal to the brute-force count.

    Cutoffs are sorted stably (ties keep original condition order); the
    elements of {1, ..., B} then split into blocks between consecutive
    sorted cutoffs.  Inside each block the active conditions slice the
    label range into intervals, every interval of size v contributes v
    choices for each element whose Y-label lies in it, and the total is
    the product over blocks and intervals.
    """
    if len(cutoffs) != k or len(y) != k:
        raise ValueError("need k cutoffs and k subsets")
    if any(not 0 <= i <= b for i in cutoffs):
        raise ValueError("cutoffs must lie in [0, B]")
    order = sorted(range(k), key=lambda j: (cutoffs[j], j))  # stable tie rule
    sorted_cuts = [0] + [cutoffs[j] for j in order] + [b]
    label_of = {}
    for lab, subset in enumerate(y, start=1):
        for x in subset:
            label_of[x] = lab
    total = 1
    for i in range(k + 1):
        lo, hi = sorted_cuts[i], sorted_cuts[i + 1]
        if hi <= lo:
            continue
        # conditions active on this block, as label interval boundaries
        anchors = sorted({0, k + 1, *(order[j] + 1 for j in range(i))})
        block_labels = Counter(label_of.get(x, 0) for x in range(lo + 1, hi + 1))
        for a_lo, a_hi in zip(anchors, anchors[1:]):
            span = a_hi - a_lo
            weight = sum(c for lab, c in block_labels.items() if a_lo <= lab < a_hi)
            total *= span**weight
    return total


@dataclass(frozen=True)
class MomentBound:
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1 + 1e-9)


def suffix_moment_bound(b: int, k: int, p: float, cutoffs, cap: int = DEFAULT_TUPLE_CAP) -> MomentBound:
    """Compare sum over Y of suffix_match_count(Y)^(p-1) with the closed
    product bound

        (k+1)^B * prod_j ((j-1 + (k-j+2)^p) / (j + (k-j+1)^p))^(sorted cutoff_j).
    """
    lhs = 0.0
    for y in disjoint_tuples(b, k, cap):
        lhs += suffix_match_count(y, cutoffs, b, k) ** (p - 1.0)
    sorted_cuts = sorted(cutoffs)
    rhs = float((k + 1) ** b)
    for j in range(1, k + 1):
        ratio = (j - 1 + (k - j + 2) ** p) / (j + (k - j + 1) ** p)
        rhs *= ratio ** sorted_cuts[j - 1]
    return MomentBound(lhs=lhs, rhs=rhs)


@dataclass(frozen=True)
class GapMargin:
    min_value: float
    argmin: float
    at_zero: float
    at_k: float


def moment_gap_margin(k: int, grid_points: int = 10**4) -> GapMargin:
    """Minimum over [1, k-1] of f(x) = (k+1) (rho^(P-1))^x + x - (x+1)^P - k.

    f vanishes at the endpoints 0 and k; positivity on [1, k-1] is the
    margin that makes the moment-bound geometric series converge.
    """
    from .arith import model_constants

    if k < 2:
        raise ValueError("the margin is defined for k >= 2")
    consts = model_constants(k)
    base = consts.rho ** (consts.p - 1.0)

    def f(x: float) -> float:
        return (k + 1) * base**x + x - (x + 1.0) ** consts.p - k

    best_x, best_v = 1.0, f(1.0)
    for i in range(grid_points):
        x = 1.0 + (k - 2) * i / (grid_points - 1) if grid_points > 1 else 1.0
        v = f(x)
        if v < best_v:
            best_x, best_v = x, v
    return GapMargin(min_value=best_v, argmin=best_x, at_zero=f(0.0), at_k=f(float(k)))
