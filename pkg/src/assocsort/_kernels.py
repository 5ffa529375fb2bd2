"""Compiled in-place kernels.

Every kernel works on an int64 view of the caller's word buffer and touches
only ``a[lo:lo + n]``.  Positions are relative to ``lo``.  Tag tests use
``x & tag`` so that w = 64 (tag = sign bit) and narrower simulated widths go
through the same code.  Kernels never allocate.
"""

import numba
from numba import njit

from .wordmodel import CorruptionError

_jit = njit(cache=True, nogil=True)


@_jit
def region_min(a, lo, n):
    m = a[lo]
    for i in range(lo + 1, lo + n):
        if a[i] < m:
            m = a[i]
    return m


@_jit
def practice(a, lo, n, delta, eps, tag, pmask, thresh, limit):
    """Map every value of the interval onto its node and count duplicates.

    Returns (n_d, n_c, n_d_prime, delta_prime, heavy, visits); ``heavy`` is
    the number of nodes whose idle count reached ``thresh``.
    """
    n_d = 0
    n_c = 0
    n_dp = 0
    heavy = 0
    visits = 0
    delta_p = limit
    i = 0
    while i < n:
        visits += 1
        x = a[lo + i]
        if x & tag:
            if i < eps:
                raise CorruptionError("node found inside the recovery area")
            i += 1
            continue
        if x < delta:
            # stale idle of an interval sorted earlier
            i += 1
            continue
        j = x - delta + eps
        if j >= n:
            n_dp += 1
            if x < delta_p:
                delta_p = x
            i += 1
            continue
        y = a[lo + j]
        if y & tag:
            a[lo + j] = y + 1
            if (y & pmask) + 1 == thresh:
                heavy += 1
            n_c += 1
            i += 1
        else:
            a[lo + i] = y
            a[lo + j] = tag
            n_d += 1
            if j <= i:
                i += 1
    return n_d, n_c, n_dp, delta_p, heavy, visits


@_jit
def practice_signed(a, lo, n, delta, eps, thresh, limit):
    """Same pass with nodes encoded as -(count + 1); no bit masking."""
    n_d = 0
    n_c = 0
    n_dp = 0
    heavy = 0
    visits = 0
    delta_p = limit
    node_heavy = -(thresh + 1)
    i = 0
    while i < n:
        visits += 1
        x = a[lo + i]
        if x < delta:
            # nodes are negative, so they land here too
            i += 1
            continue
        j = x - delta + eps
        if j >= n:
            n_dp += 1
            if x < delta_p:
                delta_p = x
            i += 1
            continue
        y = a[lo + j]
        if y >= 0:
            a[lo + i] = y
            a[lo + j] = -1
            n_d += 1
            if j <= i:
                i += 1
        else:
            a[lo + j] = y - 1
            if y - 1 == node_heavy:
                heavy += 1
            n_c += 1
            i += 1
    return n_d, n_c, n_dp, delta_p, heavy, visits


@_jit
def signed_to_tagged(a, lo, n, tag):
    for i in range(lo, lo + n):
        x = a[i]
        if x < 0:
            a[i] = tag | (-x - 1)


@_jit
def _is_idle(x, tag, delta, eps, n):
    return (x & tag) == 0 and x >= delta and x - delta + eps < n


@_jit
def _find_idle(a, lo, start, n, tag, delta, eps):
    for q in range(start, n):
        if _is_idle(a[lo + q], tag, delta, eps, n):
            return q, q - start + 1
    return -1, n - start


@_jit
def store(a, lo, n, n_d, delta, eps, tag, pmask, cbits):
    """Compact the nodes, in order, into records at the front of the region.

    Returns (epsilon_prime, search_restarts, dropped, visits).
    """
    thresh = 1 << cbits
    i = eps
    j = 0
    k = n_d
    eps_p = 0
    p = 0
    restarts = 0
    dropped = 0
    visits = 0
    while k > 0:
        if i >= n:
            raise CorruptionError("store ran off the region with nodes left")
        x = a[lo + i]
        visits += 1
        if (x & tag) == 0:
            i += 1
            continue
        s = x & pmask
        if s + 1 <= thresh:
            a[lo + i] = a[lo + j]
            a[lo + j] = tag | (i << cbits) | s
            i += 1
            j += 1
        else:
            if j + 1 > i:
                raise CorruptionError("no room for a companion word")
            a[lo + i] = a[lo + j]
            a[lo + j] = x
            d = a[lo + j + 1]
            if d & tag:
                raise CorruptionError("companion slot holds a node")
            if p < j + 2:
                p = j + 2
            q, seen = _find_idle(a, lo, p, n, tag, delta, eps)
            visits += seen
            if q < 0:
                restarts += 1
                q, seen = _find_idle(a, lo, j + 2, n, tag, delta, eps)
                visits += seen
            if q >= 0:
                a[lo + q] = d
                p = q
            elif _is_idle(d, tag, delta, eps, n):
                dropped += 1
            else:
                raise CorruptionError("no idle word left to park a displaced value")
            a[lo + j + 1] = i
            i += 1
            j += 2
            eps_p += 1
        k -= 1
    return eps_p, restarts, dropped, visits


@_jit
def retrieve(a, lo, n, n_records, p_end, delta, eps, tag, pmask, cbits):
    """Expand the records right to left so that the run ends at ``p_end``."""
    cmask = (1 << cbits) - 1
    i = n_records - 1
    p = p_end
    written = 0
    while i >= 0:
        x = a[lo + i]
        if x & tag:
            payload = x & pmask
            pos = payload >> cbits
            k = payload & cmask
            i -= 1
        else:
            if i == 0:
                raise CorruptionError("companion word without a node before it")
            y = a[lo + i - 1]
            if (y & tag) == 0:
                raise CorruptionError("two untagged words in short-term memory")
            pos = x
            k = y & pmask
            i -= 2
        if pos < eps or pos >= n:
            raise CorruptionError("record position outside the subspace")
        if p - k <= i:
            raise CorruptionError("retrieval would overwrite unread records")
        v = pos - eps + delta
        for t in range(lo + p - k, lo + p + 1):
            a[t] = v
        p -= k + 1
        written += k + 1
    return written


@_jit
def partition(a, lo, start, end, delta, eps, n):
    """Move in-interval words of ``[start, end)`` to its front; return the split."""
    left = start
    right = end - 1
    while True:
        while left <= right and a[lo + left] >= delta and a[lo + left] - delta + eps < n:
            left += 1
        while left <= right and not (a[lo + right] >= delta and a[lo + right] - delta + eps < n):
            right -= 1
        if left >= right:
            break
        t = a[lo + left]
        a[lo + left] = a[lo + right]
        a[lo + right] = t
        left += 1
        right -= 1
    return left


@_jit
def tail_shift(a, lo, n, shift, delta, eps, tag, pmask, thresh, delta_p):
    """Give the nodes in the last ``shift`` positions back their values, then
    move every remaining node right by ``shift``.

    Returns (nodes_removed, idles_removed, heavy_removed, delta_prime, visits).
    """
    nodes = 0
    idles = 0
    heavy = 0
    visits = 0
    for q in range(n - shift, n):
        visits += 1
        x = a[lo + q]
        if x & tag:
            k = x & pmask
            v = q - eps + delta
            a[lo + q] = v
            nodes += 1
            idles += k
            if k >= thresh:
                heavy += 1
            if v < delta_p:
                delta_p = v
    for q in range(n - shift - 1, eps - 1, -1):
        visits += 1
        x = a[lo + q]
        if x & tag:
            d = lo + q + shift
            y = a[d]
            if y & tag:
                raise CorruptionError("subspace shift hit a node")
            a[d] = x
            a[lo + q] = y
    return nodes, idles, heavy, delta_p, visits


@_jit
def sequential_pass(a, lo, n, delta, eps, tag, pmask, cbits, limit, signed):
    """One practice/store/partition/retrieve round over ``a[lo:lo + n]``.

    ``eps`` is the reserved recovery area (0 for the exact variant).  If more
    nodes turn heavy than ``eps`` can absorb, the tail of the subspace is
    given back and the subspace shifted so the store phase always has room.
    """
    thresh = 1 << cbits
    if signed:
        n_d, n_c, n_dp, delta_p, heavy, visits = practice_signed(
            a, lo, n, delta, eps, thresh, limit)
        signed_to_tagged(a, lo, n, tag)
        visits += n
    else:
        n_d, n_c, n_dp, delta_p, heavy, visits = practice(
            a, lo, n, delta, eps, tag, pmask, thresh, limit)
    shift = 0
    if heavy > eps:
        shift = heavy - eps
        nodes, idles, h, delta_p, v = tail_shift(
            a, lo, n, shift, delta, eps, tag, pmask, thresh, delta_p)
        n_d -= nodes
        n_c -= idles
        n_dp += nodes + idles
        heavy -= h
        eps += shift
        visits += v
    eps_p, restarts, dropped, v = store(a, lo, n, n_d, delta, eps, tag, pmask, cbits)
    visits += v
    start = n_d + eps_p
    partition(a, lo, start, n, delta, eps, n)
    visits += n - start
    retrieve(a, lo, n, n_d + eps_p, n_d + n_c - 1, delta, eps, tag, pmask, cbits)
    visits += n_d + n_c
    return n_d, n_c, n_dp, delta_p, eps, eps_p, heavy, shift, restarts, dropped, visits


@_jit
def practice_and_store(a, lo, n, delta, eps, tag, pmask, cbits, limit):
    """Recursive-variant level: practice, repair if needed, store.  No partition."""
    thresh = 1 << cbits
    n_d, n_c, n_dp, delta_p, heavy, visits = practice(
        a, lo, n, delta, eps, tag, pmask, thresh, limit)
    shift = 0
    if heavy > eps:
        shift = heavy - eps
        nodes, idles, h, delta_p, v = tail_shift(
            a, lo, n, shift, delta, eps, tag, pmask, thresh, delta_p)
        n_d -= nodes
        n_c -= idles
        n_dp += nodes + idles
        heavy -= h
        eps += shift
        visits += v
    eps_p, restarts, dropped, v = store(a, lo, n, n_d, delta, eps, tag, pmask, cbits)
    visits += v
    return n_d, n_c, n_dp, delta_p, eps, eps_p, heavy, shift, restarts, dropped, visits


@_jit
def small_region(a, lo, n, delta):
    """Sort a region of at most two words by comparison.

    Words below ``delta`` are stale and are pushed to the front; the live
    ones end up sorted at the back.  Returns (live, distinct).
    """
    if n == 1:
        return (1, 1) if a[lo] >= delta else (0, 0)
    x = a[lo]
    y = a[lo + 1]
    live = (x >= delta) + (y >= delta)
    if live == 2:
        if x > y:
            a[lo] = y
            a[lo + 1] = x
        return 2, 1 if x == y else 2
    if x >= delta and y < delta:
        a[lo] = y
        a[lo + 1] = x
    return live, live


@_jit
def split_by_tag(a, lo, n, tag):
    """Untagged words to the front, tagged to the back; return the split."""
    left = lo
    right = lo + n - 1
    while True:
        while left <= right and (a[left] & tag) == 0:
            left += 1
        while left <= right and (a[right] & tag) != 0:
            right -= 1
        if left >= right:
            break
        t = a[left]
        a[left] = a[right]
        a[right] = t
        left += 1
        right -= 1
    return left - lo


@_jit
def toggle_tag(a, lo, n, tag):
    for i in range(lo, lo + n):
        a[i] ^= tag


@_jit
def cycle_leader(a, lo, n, delta):
    """Sort distinct values forming exactly {delta .. delta + n - 1}."""
    moves = 0
    for i in range(n):
        while a[lo + i] - delta != i:
            v = a[lo + i]
            j = v - delta
            if j < 0 or j >= n:
                raise CorruptionError("value outside [delta, delta + n)")
            if a[lo + j] == v:
                raise CorruptionError("duplicate value; values must be distinct")
            a[lo + i] = a[lo + j]
            a[lo + j] = v
            moves += 2
    return moves


@_jit
def chain_build(a, lo, n, base, delta, length, tag):
    """Practice the distinct values of [delta, delta + length) into
    positions base.. and link every node to the next one created.

    Returns (head, n_d); head is -1 when nothing was practiced.
    """
    head = -1
    prev = -1
    n_d = 0
    i = 0
    while i < n:
        x = a[lo + i]
        if (x & tag) or x < delta or x - delta >= length:
            i += 1
            continue
        j = base + x - delta
        y = a[lo + j]
        if y & tag:
            i += 1
            continue
        a[lo + i] = y
        a[lo + j] = tag | j
        if prev < 0:
            head = j
        else:
            a[lo + prev] = tag | j
        prev = j
        n_d += 1
        if j <= i:
            i += 1
    return head, n_d


@_jit
def count_idles(a, lo, n, delta, length, tag, pmask):
    """Practice the leftover in-interval words into counting nodes at 0.."""
    created = 0
    i = 0
    while i < n:
        x = a[lo + i]
        if (x & tag) or x < delta or x - delta >= length:
            i += 1
            continue
        s = x - delta
        y = a[lo + s]
        if y & tag:
            if (y & pmask) == pmask:
                raise CorruptionError("secondary count overflow")
            a[lo + s] = y + 1
            i += 1
        else:
            a[lo + i] = y
            a[lo + s] = tag | 1
            created += 1
            if s <= i:
                i += 1
    return created


@_jit
def chain_teardown(a, lo, base, head, delta, length, n_d, tag, pmask, counts):
    """Turn every node of the index back into its value.  Returns nodes restored."""
    if counts:
        for s in range(length):
            if a[lo + s] & tag:
                a[lo + s] = delta + s
    if head < 0:
        return 0
    walked = 0
    pos = head
    while True:
        x = a[lo + pos]
        if (x & tag) == 0:
            raise CorruptionError("chain reached an untagged word")
        nxt = x & pmask
        if nxt < base or nxt >= base + length:
            raise CorruptionError("chain link points outside the subspace")
        a[lo + pos] = delta + pos - base
        walked += 1
        if nxt == pos:
            break
        if walked > n_d:
            raise CorruptionError("chain is longer than the node count")
        pos = nxt
    return walked


@_jit
def nop(a, lo, n):
    return 0


def compiled_kernels():
    return {
        name: obj
        for name, obj in globals().items()
        if isinstance(obj, numba.core.registry.CPUDispatcher)
    }
