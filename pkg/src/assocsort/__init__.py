"""In-place associative integer sorting.

Integers are sorted inside their own array by mapping each value of an
interval onto a position of the array (a node, tagged with the top bit of
the word), counting duplicates in the freed bits, packing the nodes into a
short prefix and expanding that prefix back into the sorted run.  Only a
constant number of counters is used beside the array.
"""

from .drivers import (
    EPSILON_POLICIES,
    VARIANTS,
    SortReport,
    sort,
    sort_exact_epsilon,
    sort_full_range,
    sort_recursive,
    sort_sequential,
)
from .phases import (
    PassStats,
    Region,
    partition_idle,
    practice,
    practice_signed,
    retrieve,
    retrieve_tail_and_shift,
    signed_to_tagged,
    sort_distinct_cycle_leader,
    store,
)
from .rangeindex import (
    RangeIndex,
    build_range_index,
    enumerate_values,
    query_contains,
    query_count,
    teardown,
)
from .wordmodel import (
    CorruptionError,
    IntervalParams,
    ModelError,
    WordModel,
    compute_epsilon,
    hash_value,
    inverse_hash,
    pack_record,
    unpack_record,
)

__all__ = [
    "EPSILON_POLICIES", "VARIANTS", "SortReport", "sort", "sort_exact_epsilon",
    "sort_full_range", "sort_recursive", "sort_sequential", "PassStats", "Region",
    "partition_idle", "practice", "practice_signed", "retrieve",
    "retrieve_tail_and_shift", "signed_to_tagged", "sort_distinct_cycle_leader",
    "store", "CorruptionError", "IntervalParams", "ModelError", "WordModel",
    "compute_epsilon", "hash_value", "inverse_hash", "pack_record", "unpack_record",
    "RangeIndex", "build_range_index", "enumerate_values", "query_contains", "query_count",
    "teardown",
]
