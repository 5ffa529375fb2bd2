"""Linked range-query index over one value interval.

The distinct values of ``[delta, delta + length)`` become nodes in the upper
half of the region; every node's payload links to the node created after it
and the last one links to itself.  Optionally the remaining duplicates are
counted into a second set of nodes in the lower half, at the same offset, so
a count query costs two word reads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels as K
from .phases import Region, as_region, words
from .wordmodel import CorruptionError, ModelError, WordModel

EMPTY = -1


@dataclass
class RangeIndex:
    head: int              # region-relative position of the first node, or EMPTY
    delta: int
    length: int
    primary_region: Region
    secondary_region: Optional[Region]
    has_counts: bool
    n_d: int
    region: Region
    model: WordModel
    reads: int = 0         # word reads done by the latest query
    live: bool = True

    @property
    def interval(self) -> tuple[int, int]:
        return self.delta, self.length

    @property
    def base(self) -> int:
        return self.primary_region.lo - self.region.lo

    def __contains__(self, value) -> bool:
        return self.delta <= value < self.delta + self.length


def build_range_index(buffer, region=None, interval=(0, 0), with_counts=False,
                      model: Optional[WordModel] = None) -> RangeIndex:
    """Practice the distinct values of ``interval = (delta, length)`` in place.

    ``length`` may be at most half the region, otherwise the primary and
    secondary subspaces would overlap.
    """
    model = model or WordModel()
    a = words(buffer)
    r = as_region(a, region)
    n = len(r)
    delta, length = (int(v) for v in interval)
    if length < 0 or delta < 0:
        raise ModelError(f"bad interval {interval}")
    if length > n // 2:
        raise ModelError(f"interval length {length} exceeds half the region ({n // 2}); "
                         "the subspaces would overlap")
    if n and int(a[r.lo:r.hi].view(np.uint64).max()) >= model.value_limit:
        raise ModelError("buffer holds tagged words or values past 2^(w-1)")
    base = n - n // 2
    primary = Region(r.lo + base, r.lo + base + length)
    secondary = Region(r.lo, r.lo + length) if with_counts else None
    tag = model.tag_i64
    head, n_d = (EMPTY, 0) if length == 0 else K.chain_build(a, r.lo, n, base, delta,
                                                              length, tag)
    if with_counts and n_d:
        K.count_idles(a, r.lo, n, delta, length, tag, model.payload_mask)
    return RangeIndex(head=head, delta=delta, length=length, primary_region=primary,
                      secondary_region=secondary, has_counts=with_counts, n_d=n_d,
                      region=r, model=model)


def _check(index: RangeIndex, value: int):
    if not index.live:
        raise ModelError("index was torn down")
    if value not in index:
        raise ModelError(f"value {value} outside [{index.delta}, "
                         f"{index.delta + index.length})")


def query_contains(index: RangeIndex, buffer, value: int) -> bool:
    _check(index, value)
    a = words(buffer)
    index.reads = 1
    return bool(a[index.primary_region.lo + value - index.delta] & index.model.tag_i64)


def query_count(index: RangeIndex, buffer, value: int) -> int:
    """Occurrences of ``value``: one read in each subspace at the value's offset."""
    if not index.has_counts:
        raise ModelError("index was built without counts")
    _check(index, value)
    a = words(buffer)
    off = value - index.delta
    tag = index.model.tag_i64
    index.reads = 1
    if not a[index.primary_region.lo + off] & tag:
        return 0
    index.reads = 2
    y = int(a[index.secondary_region.lo + off])
    if y & tag:
        return 1 + (y & index.model.payload_mask)
    return 1


def enumerate_values(index: RangeIndex, buffer, order: str = "chain") -> list:
    """Distinct values of the interval, in creation (``chain``) or ascending order."""
    if not index.live:
        raise ModelError("index was torn down")
    a = words(buffer)
    tag, pmask = index.model.tag_i64, index.model.payload_mask
    lo, base = index.region.lo, index.base
    out = []
    if order == "sorted":
        for p in range(index.primary_region.lo, index.primary_region.hi):
            if a[p] & tag:
                out.append(index.delta + p - index.primary_region.lo)
        return out
    if order != "chain":
        raise ModelError(f"unknown order {order!r}")
    pos = index.head
    while pos != EMPTY:
        out.append(index.delta + pos - base)
        nxt = int(a[lo + pos]) & pmask
        pos = EMPTY if nxt == pos else nxt
    return out


def teardown(index: RangeIndex, buffer) -> None:
    """Give every node its value back; the buffer holds the original multiset again."""
    if not index.live:
        return
    a = words(buffer)
    m = index.model
    if index.length:
        walked = K.chain_teardown(a, index.region.lo, index.base, index.head, index.delta,
                                  index.length, index.n_d, m.tag_i64, m.payload_mask,
                                  index.has_counts)
        if walked != index.n_d:
            raise CorruptionError(f"chain held {walked} nodes, expected {index.n_d}")
    index.live = False
