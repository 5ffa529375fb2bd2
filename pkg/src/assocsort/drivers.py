"""Sorting entry points built from the phases.

``sort_sequential`` repeats practice/store/partition/retrieve on a shrinking
tail; ``sort_recursive`` stacks the levels instead and skips partitioning;
``sort_exact_epsilon`` reserves no recovery area up front and makes exactly
as much room as the heavy nodes need.  ``sort`` picks one and, by default,
wraps it so the full w-bit universe can be sorted.
"""

from __future__ import annotations

import sys

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels as K
from .phases import PassStats, Region, as_region, words
from .wordmodel import ModelError, WordModel, ceil_log2, compute_epsilon

VARIANTS = ("sequential", "recursive", "exact-epsilon")
EPSILON_POLICIES = ("formula", "max", "exact")


@dataclass
class SortReport:
    passes: int = 0
    scanned_words: int = 0
    per_pass: list = field(default_factory=list)

    def record(self, stats: PassStats):
        self.passes += 1
        self.scanned_words += stats.scanned
        self.per_pass.append(stats)

    def merge(self, other: "SortReport"):
        self.passes += other.passes
        self.scanned_words += other.scanned_words
        self.per_pass.extend(other.per_pass)

    @property
    def companions(self) -> int:
        return sum(s.epsilon_prime for s in self.per_pass)

    @property
    def shifts(self) -> int:
        """Passes where the reserved recovery area had to grow."""
        return sum(1 for s in self.per_pass if s.shift)


def reserved_epsilon(n: int, model: WordModel, policy: str) -> int:
    """Recovery area reserved before practicing a region of length ``n``.

    ``formula`` is the pigeonhole estimate, ``max`` its n/2 upper bound (the
    regime the average-case analysis assumes on every pass), ``exact``
    reserves nothing and lets the pass grow the area on demand.
    """
    if policy == "formula":
        return compute_epsilon(n, model)
    if policy == "max":
        return n // 2
    if policy == "exact":
        return 0
    raise ModelError(f"unknown epsilon policy {policy!r}")


def _check_values(a: np.ndarray, r: Region, limit: int):
    if len(r) == 0:
        return
    top = int(a[r.lo:r.hi].view(np.uint64).max())
    if top >= limit:
        raise ModelError(f"value {top} is outside [0, {limit})")


def _small(a, lo, n, delta, report: SortReport) -> int:
    live, distinct = K.small_region(a, lo, n, delta)
    report.record(PassStats(n=n, delta=int(a[lo + n - live]) if live else delta,
                            n_d=distinct, n_c=live - distinct, scanned=n))
    return live


def _sequential(a, r: Region, model: WordModel, policy: str, discover: bool,
                signed: bool) -> SortReport:
    report = SortReport()
    lo, n = r.lo, len(r)
    _check_values(a, r, model.value_limit)
    if n <= 2:
        if n == 0:
            report.passes = 1
        else:
            _small(a, lo, n, 0, report)
        return report
    model.check_region(n)
    tag, pmask, limit = model.tag_i64, model.payload_mask, model.value_limit - 1
    if discover:
        delta = 0
    else:
        delta = K.region_min(a, lo, n)
        report.scanned_words += n
    while True:
        if n <= 2:
            _small(a, lo, n, 0, report)
            break
        eps = reserved_epsilon(n, model, policy)
        cbits = model.w - 1 - ceil_log2(n)
        (n_d, n_c, n_dp, delta_p, eps, eps_p, heavy, shift, restarts, dropped,
         visits) = K.sequential_pass(a, lo, n, delta, eps, tag, pmask, cbits, limit, signed)
        report.record(PassStats(
            n=n, delta=delta, delta_prime=delta_p, epsilon=eps, n_d=n_d, n_c=n_c,
            n_d_prime=n_dp, epsilon_prime=eps_p, heavy=heavy, shift=shift,
            search_restarts=restarts, dropped=dropped, scanned=visits,
        ))
        if n_dp == 0:
            break
        lo += n_d + n_c
        n = n_dp
        delta = delta_p
    return report


def sort_sequential(buffer, region=None, model: Optional[WordModel] = None, *,
                    epsilon: str = "formula", discover: bool = False,
                    signed: bool = False) -> SortReport:
    """Sort ``buffer[region]`` in place, one interval per pass.

    After every pass the sorted prefix grows by the values just practiced,
    so a caller may consume it while later passes run.  With ``discover``
    the initial minimum scan is skipped: the first pass starts at 0 and
    finds the real minimum if nothing lands in its interval.  ``signed``
    practices with negative-count nodes instead of tag bits.
    """
    a = words(buffer)
    return _sequential(a, as_region(a, region), model or WordModel(), epsilon,
                       discover, signed)


def sort_exact_epsilon(buffer, region=None, model: Optional[WordModel] = None) -> SortReport:
    """Sequential sort that practices the whole region and then gives back
    exactly as many tail slots as there are heavy nodes."""
    a = words(buffer)
    return _sequential(a, as_region(a, region), model or WordModel(), "exact",
                       False, False)


def _level(a, lo, n, delta, model: WordModel, policy: str, report: SortReport) -> int:
    if n <= 2:
        return _small(a, lo, n, delta, report)
    tag, pmask = model.tag_i64, model.payload_mask
    eps = reserved_epsilon(n, model, policy)
    cbits = model.w - 1 - ceil_log2(n)
    (n_d, n_c, n_dp, delta_p, eps, eps_p, heavy, shift, restarts, dropped,
     visits) = K.practice_and_store(a, lo, n, delta, eps, tag, pmask, cbits,
                                    model.value_limit - 1)
    stats = PassStats(
        n=n, delta=delta, delta_prime=delta_p, epsilon=eps, n_d=n_d, n_c=n_c,
        n_d_prime=n_dp, epsilon_prime=eps_p, heavy=heavy, shift=shift,
        search_restarts=restarts, dropped=dropped, scanned=visits + n_d + n_c,
    )
    report.record(stats)
    below = 0
    if n_dp:
        start = n_d + eps_p
        below = _level(a, lo + start, n - start, delta_p, model, policy, report)
    K.retrieve(a, lo, n, n_d + eps_p, n - below - 1, delta, eps, tag, pmask, cbits)
    return below + n_d + n_c


def sort_recursive(buffer, region=None, model: Optional[WordModel] = None, *,
                   epsilon: str = "formula") -> SortReport:
    """Sort ``buffer[region]`` in place with one call level per interval.

    Each level keeps its records at the front, hands the rest of the region
    (live values plus its own now-meaningless idles) to the next level, and
    expands its records once the deeper levels have filled the back.
    """
    a = words(buffer)
    r = as_region(a, region)
    model = model or WordModel()
    report = SortReport()
    n = len(r)
    if n == 0:
        report.passes = 1
        return report
    _check_values(a, r, model.value_limit)
    if n > 2:
        model.check_region(n)
    delta = K.region_min(a, r.lo, n)
    report.scanned_words += n
    # every level places at least one value, so depth <= n
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, n + 100))
    try:
        done = _level(a, r.lo, n, delta, model, epsilon, report)
    finally:
        sys.setrecursionlimit(limit)
    if done != n:
        raise AssertionError(f"recursive sort placed {done} of {n} values")
    return report


def _run_variant(a, r: Region, model: WordModel, variant: str, epsilon: str,
                 discover: bool, signed: bool) -> SortReport:
    if variant == "sequential":
        return _sequential(a, r, model, epsilon, discover, signed)
    if variant == "recursive":
        return sort_recursive(a, r, model, epsilon=epsilon)
    if variant == "exact-epsilon":
        return _sequential(a, r, model, "exact", False, False)
    raise ModelError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def sort_full_range(buffer, model: Optional[WordModel] = None, *,
                    variant: str = "sequential", epsilon: str = "formula",
                    discover: bool = False, signed: bool = False) -> SortReport:
    """Sort words that may use all ``w`` bits.

    Words with the top bit set are split off to the back, have that bit
    cleared (a shift by ``-2^(w-1)``), get sorted like the low half, and get
    the bit back.
    """
    a = words(buffer)
    model = model or WordModel()
    n = len(a)
    if model.w < 64 and n:
        _check_values(a, Region(0, n), 1 << model.w)
    tag = model.tag_i64
    split = K.split_by_tag(a, 0, n, tag) if n else 0
    if split == n:
        return _run_variant(a, Region(0, n), model, variant, epsilon, discover, signed)
    report = SortReport(scanned_words=n)
    if split:
        report.merge(_run_variant(a, Region(0, split), model, variant, epsilon,
                                  discover, signed))
    K.toggle_tag(a, split, n - split, tag)
    try:
        report.merge(_run_variant(a, Region(split, n), model, variant, epsilon,
                                  discover, signed))
    finally:
        K.toggle_tag(a, split, n - split, tag)
    return report


def sort(buffer, model: Optional[WordModel] = None, *, variant: str = "sequential",
         full_range: bool = True, epsilon: str = "formula", discover: bool = False,
         signed: bool = False) -> SortReport:
    """Sort ``buffer`` in place and report pass and work counters.

    ``buffer`` is a uint64/int64 numpy array, or a list of non-negative ints
    (copied through a uint64 array and written back).
    """
    model = model or WordModel()
    if variant not in VARIANTS:
        raise ModelError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if isinstance(buffer, list):
        arr = np.array(buffer, dtype=np.uint64) if buffer else np.zeros(0, np.uint64)
        report = sort(arr, model, variant=variant, full_range=full_range,
                      epsilon=epsilon, discover=discover, signed=signed)
        buffer[:] = arr.tolist()
        return report
    a = words(buffer)
    n = len(a)
    if n <= 2:
        limit = (1 << model.w) if full_range else model.value_limit
        if n and (model.w < 64 or not full_range):
            _check_values(a, Region(0, n), limit)
        report = SortReport(passes=1, scanned_words=n)
        if n == 2:
            u = a.view(np.uint64)
            if u[0] > u[1]:
                u[0], u[1] = u[1], u[0]
        return report
    if full_range:
        return sort_full_range(buffer, model, variant=variant, epsilon=epsilon,
                               discover=discover, signed=signed)
    return _run_variant(a, Region(0, n), model, variant, epsilon, discover, signed)
