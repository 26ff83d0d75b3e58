"""Exact computation and empirical verification for localized factorizations:
multiplication-table counts, window-localized divisor counts, divisor-box
union volumes, Farey sum sets, disjoint set-tuple counts and
order-statistics volumes, each paired with an independent oracle."""

from .arith import (
    Factorization,
    ModelConstants,
    PrimeBlocks,
    SieveTable,
    build_sieve,
    deviation_rate,
    divisor_tuple_count,
    divisors,
    factorize,
    model_constants,
    prime_blocks,
    primes_upto,
)
from .boxes import (
    DivisorBoxSet,
    crowding_moment,
    divisor_boxes,
    holder_bound_check,
    merged_interval_volume,
    smooth_volume_sum,
    union_volume,
)
from .config import RunConfig, load_config
from .errors import CapacityError
from .localized import (
    CountMode,
    SandwichBounds,
    Window,
    has_window_tuple,
    sandwich_check,
    window_hit_count,
    window_tuple_count,
)
from .orderstats import (
    ClumpEnvelope,
    McEstimate,
    PartialSumRegion,
    StaircaseRegion,
    ThresholdRegion,
    ThresholdVector,
    ballot_probability,
    mc_region_volume,
    simplex_volume_exact,
    simplex_volume_occupancy,
)
from .table_farey import (
    farey_sumset_size_by_products,
    farey_sumset_size_direct,
    normalized_ratio,
    table_count,
    totient_sum_over_products,
)
from .tuples import (
    Composition,
    block_index,
    disjoint_tuples,
    moment_gap_margin,
    suffix_match_count,
    suffix_match_count_bruteforce,
    suffix_moment_bound,
    unique_union,
)
from .verify import run_verify

__version__ = "0.1.0"
