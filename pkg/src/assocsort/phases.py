"""The three passes of associative sorting and their helpers.

Each function mutates one region of a caller-owned word buffer in place and
returns counters.  Buffers are 1-d numpy arrays of ``uint64`` (or ``int64``)
words; the work is done by the compiled kernels in :mod:`assocsort._kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels as K
from .wordmodel import IntervalParams, ModelError, WordModel


class Region(NamedTuple):
    lo: int
    hi: int

    def __len__(self):
        return self.hi - self.lo


@dataclass
class PassStats:
    n: int = 0
    delta: int = 0
    delta_prime: int = 0
    epsilon: int = 0
    n_d: int = 0
    n_c: int = 0
    n_d_prime: int = 0
    epsilon_prime: int = 0
    # nodes whose idle count reached the packing threshold
    heavy: int = 0
    # how far the subspace was moved right to make room for companions
    shift: int = 0
    search_restarts: int = 0
    dropped: int = 0
    scanned: int = 0

    @property
    def practiced(self) -> int:
        return self.n_d + self.n_c

    def as_trace(self, index: int) -> dict:
        return {
            "pass": index,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "n_d": self.n_d,
            "n_c": self.n_c,
            "n_d_prime": self.n_d_prime,
            "epsilon_prime": self.epsilon_prime,
        }


def words(buffer) -> np.ndarray:
    """int64 view of a word buffer; no copy."""
    if not isinstance(buffer, np.ndarray) or buffer.ndim != 1:
        raise TypeError("buffer must be a 1-d numpy array")
    if buffer.dtype == np.int64:
        return buffer
    if buffer.dtype == np.uint64:
        return buffer.view(np.int64)
    raise TypeError(f"buffer dtype must be uint64 or int64, got {buffer.dtype}")


def as_region(buffer, region) -> Region:
    if region is None:
        return Region(0, len(buffer))
    lo, hi = region
    if not 0 <= lo <= hi <= len(buffer):
        raise ModelError(f"region {region} outside buffer of length {len(buffer)}")
    return Region(lo, hi)


def _kernel_args(params: IntervalParams):
    m = params.model
    return m.tag_i64, m.payload_mask, params.count_bits


def _check_params(region: Region, params: IntervalParams):
    if len(region) != params.n:
        raise ModelError(f"params built for n={params.n}, region has {len(region)} words")


def practice(buffer, region, params: IntervalParams) -> PassStats:
    """Turn the first occurrence of every in-interval value into a counting node.

    Duplicates stay where they are, untouched; values past the interval are
    counted in ``n_d_prime`` and their minimum kept in ``delta_prime``.
    """
    a = words(buffer)
    r = as_region(a, region)
    _check_params(r, params)
    stats = PassStats(n=params.n, delta=params.delta, epsilon=params.epsilon)
    if params.n == 0:
        return stats
    tag, pmask, _ = _kernel_args(params)
    n_d, n_c, n_dp, delta_p, heavy, visits = K.practice(
        a, r.lo, params.n, params.delta, params.epsilon, tag, pmask,
        params.threshold, params.model.value_limit - 1,
    )
    return replace(stats, n_d=n_d, n_c=n_c, n_d_prime=n_dp, delta_prime=delta_p,
                   heavy=heavy, scanned=visits)


def practice_signed(buffer, region, params: IntervalParams) -> PassStats:
    """Variant of :func:`practice` storing a node with count k as ``-(k + 1)``.

    Leaves negative int64 words behind; call :func:`signed_to_tagged` before
    :func:`store`.
    """
    a = words(buffer)
    r = as_region(a, region)
    _check_params(r, params)
    stats = PassStats(n=params.n, delta=params.delta, epsilon=params.epsilon)
    if params.n == 0:
        return stats
    n_d, n_c, n_dp, delta_p, heavy, visits = K.practice_signed(
        a, r.lo, params.n, params.delta, params.epsilon, params.threshold,
        params.model.value_limit - 1,
    )
    return replace(stats, n_d=n_d, n_c=n_c, n_d_prime=n_dp, delta_prime=delta_p,
                   heavy=heavy, scanned=visits)


def signed_to_tagged(buffer, region, model: WordModel) -> None:
    a = words(buffer)
    r = as_region(a, region)
    K.signed_to_tagged(a, r.lo, len(r), model.tag_i64)


def store(buffer, region, stats: PassStats, params: IntervalParams) -> PassStats:
    """Pack the nodes, in order, into ``buffer[lo:lo + n_d + epsilon_prime]``.

    A node whose count fits beside its position becomes one packed record.
    Heavier nodes keep only the count and are followed by an untagged
    companion word holding their position.
    """
    a = words(buffer)
    r = as_region(a, region)
    _check_params(r, params)
    if stats.n_d == 0:
        return replace(stats, epsilon_prime=0)
    tag, pmask, cbits = _kernel_args(params)
    eps_p, restarts, dropped, visits = K.store(
        a, r.lo, params.n, stats.n_d, params.delta, params.epsilon, tag, pmask, cbits
    )
    return replace(stats, epsilon_prime=eps_p, search_restarts=restarts, dropped=dropped,
                   scanned=stats.scanned + visits)


def retrieve(buffer, region, stats: PassStats, params: IntervalParams,
             end: Optional[int] = None) -> int:
    """Expand the short-term memory into the sorted run of practiced values.

    The run occupies ``[end - n_d - n_c + 1, end]`` relative to the region
    start; ``end`` defaults to ``n_d + n_c - 1``.  Returns the run length.
    """
    a = words(buffer)
    r = as_region(a, region)
    _check_params(r, params)
    if end is None:
        end = stats.n_d + stats.n_c - 1
    if stats.n_d == 0:
        return 0
    tag, pmask, cbits = _kernel_args(params)
    return K.retrieve(a, r.lo, params.n, stats.n_d + stats.epsilon_prime, end,
                      params.delta, params.epsilon, tag, pmask, cbits)


def partition_idle(buffer, region, params: IntervalParams) -> int:
    """Cluster in-interval words at the front of ``region``; return how many.

    ``params`` describes the enclosing pass (its ``n`` is the pass length,
    not the length of ``region``).
    """
    a = words(buffer)
    r = as_region(a, region)
    return K.partition(a, r.lo, 0, len(r), params.delta, params.epsilon, params.n)


def retrieve_tail_and_shift(buffer, region, stats: PassStats, params: IntervalParams,
                            shift: Optional[int] = None) -> PassStats:
    """Free the last ``shift`` subspace slots and move the subspace right.

    Nodes in the tail turn back into plain values; since those values, and
    all their idle copies, fall past the shrunken interval, they are moved
    to the out-of-interval tally.  ``params.epsilon`` grows by ``shift``
    (defaults to however many heavy nodes the reserved area cannot absorb).
    """
    a = words(buffer)
    r = as_region(a, region)
    _check_params(r, params)
    if shift is None:
        shift = max(0, stats.heavy - params.epsilon)
    if shift < 0 or params.epsilon + shift > params.n:
        raise ModelError(f"cannot shift by {shift}")
    if shift == 0:
        return stats
    tag, pmask, _ = _kernel_args(params)
    nodes, idles, heavy, delta_p, visits = K.tail_shift(
        a, r.lo, params.n, shift, params.delta, params.epsilon, tag, pmask,
        params.threshold, stats.delta_prime if stats.n_d_prime else params.model.value_limit - 1,
    )
    params.epsilon += shift
    return replace(
        stats,
        n_d=stats.n_d - nodes,
        n_c=stats.n_c - idles,
        n_d_prime=stats.n_d_prime + nodes + idles,
        delta_prime=delta_p,
        heavy=stats.heavy - heavy,
        epsilon=params.epsilon,
        shift=stats.shift + shift,
        scanned=stats.scanned + visits,
    )


def sort_distinct_cycle_leader(buffer, region, delta: int) -> int:
    """Sort a permutation of ``delta .. delta + n - 1`` by following its cycles.

    Each value already is its own address, so no tagging is needed.  Returns
    the number of element moves (two per swap).
    """
    a = words(buffer)
    r = as_region(a, region)
    if len(r) == 0:
        return 0
    return K.cycle_leader(a, r.lo, len(r), delta)
