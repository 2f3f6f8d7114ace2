"""Compiled kernels behind :mod:`sortnet.generate`.

Everything here works on flat numpy arrays describing a batch of networks by
their output sets:

* ``bitmap[r, x]`` is 1 when word ``x`` is an output of network ``r``;
* ``outs[r, :total[r]]`` lists the outputs grouped by popcount, ascending;
* ``csize``, ``zmask``/``omask``, ``zcnt``/``ocnt`` are per-cluster sizes,
  zeros/ones masks and their popcounts;
* ``chan[r, i]`` packs, for channel ``i``, bit ``p`` = "i in zeros(p)" and bit
  ``n + 1 + p`` = "i in ones(p)". Graph edges and the zeros/ones filter are
  inclusions between these words.

The matching enumerator and the augmenting-path seed mirror
:mod:`sortnet.matching` step for step, so both produce the same stream.
"""

from __future__ import annotations

import numba as nb
import numpy as np
from numba import njit, prange

nb.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

# counter slots
C_TOTAL = 0
C_FOUND = 1
C_ST1 = 2
C_ST2 = 3
C_ST3 = 4
C_NOPM = 5
C_EXHAUSTED = 6
C_VERIFIED = 7
C_TRIED = 8
N_COUNTERS = 9

VARIANT_PERMUTATION = 1
VARIANT_MATCHING = 2


def cluster_order(n: int) -> np.ndarray:
    words = np.arange(1 << n, dtype=np.int64)
    pop = np.array([int(w).bit_count() for w in range(1 << n)], dtype=np.int64)
    return words[np.lexsort((words, pop))]


@njit(cache=True)
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit(cache=True)
def bitmaps_from_networks(nets, n):
    """Output-set membership for each network in ``nets`` (shape ``(m, k, 2)``)."""
    m = nets.shape[0]
    k = nets.shape[1]
    size = 1 << n
    out = np.zeros((m, size), dtype=np.uint8)
    for r in range(m):
        for x0 in range(size):
            x = x0
            for t in range(k):
                i = nets[r, t, 0]
                j = nets[r, t, 1]
                if (x >> i) & 1 and not (x >> j) & 1:
                    x ^= (1 << i) | (1 << j)
            out[r, x] = 1
    return out


@njit(cache=True)
def summarize(bitmap, n, order):
    m = bitmap.shape[0]
    full = (1 << n) - 1
    total = np.zeros(m, dtype=np.int32)
    for r in range(m):
        total[r] = bitmap[r].sum()
    width = 1
    for r in range(m):
        if total[r] > width:
            width = total[r]
    outs = np.zeros((m, width), dtype=np.int32)
    csize = np.zeros((m, n + 1), dtype=np.int32)
    zmask = np.zeros((m, n + 1), dtype=np.int64)
    omask = np.zeros((m, n + 1), dtype=np.int64)
    zcnt = np.zeros((m, n + 1), dtype=np.int32)
    ocnt = np.zeros((m, n + 1), dtype=np.int32)
    chan = np.zeros((m, n), dtype=np.int64)
    for r in range(m):
        t = 0
        for x in order:
            if bitmap[r, x]:
                outs[r, t] = x
                t += 1
                p = _popcount(x)
                csize[r, p] += 1
                omask[r, p] |= x
                zmask[r, p] |= full & ~x
        for p in range(n + 1):
            zcnt[r, p] = _popcount(zmask[r, p])
            ocnt[r, p] = _popcount(omask[r, p])
            for i in range(n):
                if (zmask[r, p] >> i) & 1:
                    chan[r, i] |= np.int64(1) << p
                if (omask[r, p] >> i) & 1:
                    chan[r, i] |= np.int64(1) << (n + 1 + p)
    return total, outs, csize, zmask, omask, zcnt, ocnt, chan


def expand(parent_bitmap: np.ndarray, n: int):
    """Children of every parent by every non-redundant comparator.

    Returns ``(bitmap, parent_index, low, high)`` in ``(parent, low, high)``
    order, plus the number of redundant extensions skipped.
    """
    m = parent_bitmap.shape[0]
    words = np.arange(1 << n)
    pairs = [(i, j) for i in range(n - 1) for j in range(i + 1, n)]
    children = np.empty((m, len(pairs), 1 << n), dtype=np.uint8)
    useful = np.empty((m, len(pairs)), dtype=bool)
    for c, (i, j) in enumerate(pairs):
        bad = words[((words >> i) & 1 == 1) & ((words >> j) & 1 == 0)]
        fixed = bad ^ ((1 << i) | (1 << j))
        child = parent_bitmap.copy()
        child[:, fixed] |= parent_bitmap[:, bad]
        child[:, bad] = 0
        children[:, c] = child
        useful[:, c] = parent_bitmap[:, bad].any(axis=1)
    keep = useful.reshape(-1)
    flat = children.reshape(m * len(pairs), 1 << n)[keep]
    pair_arr = np.array(pairs, dtype=np.int64)
    parent_index = np.repeat(np.arange(m), len(pairs))[keep]
    comp = np.tile(np.arange(len(pairs)), m)[keep]
    return flat, parent_index, pair_arr[comp, 0], pair_arr[comp, 1], int((~keep).sum())


@njit(cache=True)
def _permute(x, pi, n):
    y = 0
    for i in range(n):
        if (x >> i) & 1:
            y |= 1 << pi[i]
    return y


@njit(cache=True)
def verify(pi, n, a_outs, a_total, b_bitmap):
    # first and last entries are the all-zero and all-one words
    for t in range(1, a_total - 1):
        if not b_bitmap[_permute(a_outs[t], pi, n)]:
            return False
    return True


@njit(cache=True)
def _seed(n, adj, match, match_inv):
    """Augmenting-path perfect matching; same traversal as the Python seed."""
    parent_right = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for v in range(n):
        match[v] = -1
        match_inv[v] = -1
    for u in range(n):
        if adj[u] == 0:
            return False
        for v in range(n):
            parent_right[v] = -1
        seen = 0
        head = 0
        tail = 0
        queue[tail] = u
        tail += 1
        end = -1
        while head < tail and end < 0:
            x = queue[head]
            head += 1
            rest = adj[x] & ~seen
            for v in range(n):
                if (rest >> v) & 1:
                    seen |= 1 << v
                    parent_right[v] = x
                    if match_inv[v] < 0:
                        end = v
                        break
                    queue[tail] = match_inv[v]
                    tail += 1
        if end < 0:
            return False
        v = end
        while v >= 0:
            x = parent_right[v]
            prev = match[x]
            match[x] = v
            match_inv[v] = x
            v = prev if x != u else -1
    return True


@njit(cache=True)
def _trim(n, adj, match, out):
    match_inv = np.empty(n, dtype=np.int64)
    for i in range(n):
        match_inv[match[i]] = i
    reach = np.zeros(n, dtype=np.int64)
    for i in range(n):
        rest = adj[i] & ~(1 << match[i])
        s = 0
        for j in range(n):
            if (rest >> j) & 1:
                s |= 1 << match_inv[j]
        reach[i] = s
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = reach[i]
            r = reach[i]
            for k in range(n):
                if (r >> k) & 1:
                    acc |= reach[k]
            if acc != reach[i]:
                reach[i] = acc
                changed = True
    for i in range(n):
        row = 1 << match[i]
        rest = adj[i] & ~(1 << match[i])
        for j in range(n):
            if (rest >> j) & 1 and (reach[match_inv[j]] >> i) & 1:
                row |= 1 << j
        out[i] = row


@njit(cache=True)
def _swap_cycle(n, adj, match, i, j, new):
    match_inv = np.empty(n, dtype=np.int64)
    for a in range(n):
        match_inv[match[a]] = a
    start = match_inv[j]
    parent = np.full(n, -1, dtype=np.int64)
    parent[start] = start
    queue = np.empty(n, dtype=np.int64)
    head = 0
    tail = 1
    queue[0] = start
    while head < tail:
        x = queue[head]
        head += 1
        if x == i:
            break
        rest = adj[x] & ~(1 << match[x])
        for yr in range(n):
            if (rest >> yr) & 1:
                y = match_inv[yr]
                if parent[y] < 0:
                    parent[y] = x
                    queue[tail] = y
                    tail += 1
    for a in range(n):
        new[a] = match[a]
    # walk back from i, each predecessor takes its successor's partner
    cur = i
    while cur != start:
        prev = parent[cur]
        new[prev] = match[cur]
        cur = prev
    new[i] = j


@njit(cache=True)
def enumerate_matchings(n, adj0, limit):
    """All perfect matchings (up to ``limit``) in the enumerator's order."""
    out = np.empty((limit, n), dtype=np.int64)
    cnt = 0
    match = np.empty(n, dtype=np.int64)
    match_inv = np.empty(n, dtype=np.int64)
    if not _seed(n, adj0, match, match_inv):
        return out[:0]
    out[0] = match
    cnt = 1
    depth_cap = n * n + 2
    st_adj = np.empty((depth_cap, n), dtype=np.int64)
    st_match = np.empty((depth_cap, n), dtype=np.int64)
    st_adj[0] = adj0
    st_match[0] = match
    sp = 1
    trimmed = np.empty(n, dtype=np.int64)
    swapped = np.empty(n, dtype=np.int64)
    while sp > 0 and cnt < limit:
        sp -= 1
        cur_match = st_match[sp].copy()
        _trim(n, st_adj[sp], cur_match, trimmed)
        fi = -1
        fj = -1
        for i in range(n):
            rest = trimmed[i] & ~(1 << cur_match[i])
            if rest:
                fi = i
                fj = 0
                while not (rest >> fj) & 1:
                    fj += 1
                break
        if fi < 0:
            continue
        _swap_cycle(n, trimmed, cur_match, fi, fj, swapped)
        out[cnt] = swapped
        cnt += 1
        # exclude-branch below include-branch so include pops first
        for a in range(n):
            st_adj[sp, a] = trimmed[a]
            st_match[sp, a] = cur_match[a]
        st_adj[sp, fi] &= ~(1 << fj)
        sp += 1
        for a in range(n):
            st_adj[sp, a] = trimmed[a] & ~(1 << fj)
            st_match[sp, a] = swapped[a]
        st_adj[sp, fi] = 1 << fj
        sp += 1
    return out[:cnt]


@njit(cache=True)
def _matching_search(n, adj0, a_outs, a_total, b_bitmap, counters, st_adj, st_match, witness):
    match = np.empty(n, dtype=np.int64)
    match_inv = np.empty(n, dtype=np.int64)
    if not _seed(n, adj0, match, match_inv):
        counters[C_NOPM] += 1
        return False
    counters[C_TRIED] += 1
    counters[C_VERIFIED] += 1
    if verify(match, n, a_outs, a_total, b_bitmap):
        witness[:] = match
        return True
    st_adj[0, :n] = adj0
    st_match[0, :n] = match
    sp = 1
    trimmed = np.empty(n, dtype=np.int64)
    swapped = np.empty(n, dtype=np.int64)
    cur_match = np.empty(n, dtype=np.int64)
    while sp > 0:
        sp -= 1
        for a in range(n):
            cur_match[a] = st_match[sp, a]
        _trim(n, st_adj[sp], cur_match, trimmed)
        fi = -1
        fj = -1
        for i in range(n):
            rest = trimmed[i] & ~(1 << cur_match[i])
            if rest:
                fi = i
                fj = 0
                while not (rest >> fj) & 1:
                    fj += 1
                break
        if fi < 0:
            continue
        _swap_cycle(n, trimmed, cur_match, fi, fj, swapped)
        counters[C_TRIED] += 1
        counters[C_VERIFIED] += 1
        if verify(swapped, n, a_outs, a_total, b_bitmap):
            witness[:] = swapped
            return True
        for a in range(n):
            st_adj[sp, a] = trimmed[a]
            st_match[sp, a] = cur_match[a]
        st_adj[sp, fi] &= ~(1 << fj)
        sp += 1
        for a in range(n):
            st_adj[sp, a] = trimmed[a] & ~(1 << fj)
            st_match[sp, a] = swapped[a]
        st_adj[sp, fi] = 1 << fj
        sp += 1
    counters[C_EXHAUSTED] += 1
    return False


@njit(cache=True)
def _permutation_search(n, a_zm, a_om, b_zm, b_om, a_outs, a_total, b_bitmap, counters, witness):
    pi = np.arange(n)
    while True:
        counters[C_TRIED] += 1
        ok = True
        for p in range(n + 1):
            if _permute(a_zm[p], pi, n) & ~b_zm[p]:
                ok = False
                break
            if _permute(a_om[p], pi, n) & ~b_om[p]:
                ok = False
                break
        if ok:
            counters[C_VERIFIED] += 1
            if verify(pi, n, a_outs, a_total, b_bitmap):
                witness[:] = pi
                return True
        # next lexicographic permutation
        k = n - 2
        while k >= 0 and pi[k] >= pi[k + 1]:
            k -= 1
        if k < 0:
            break
        m = n - 1
        while pi[m] <= pi[k]:
            m -= 1
        tmp = pi[k]
        pi[k] = pi[m]
        pi[m] = tmp
        lo = k + 1
        hi = n - 1
        while lo < hi:
            tmp = pi[lo]
            pi[lo] = pi[hi]
            pi[hi] = tmp
            lo += 1
            hi -= 1
    counters[C_EXHAUSTED] += 1
    return False


@njit(cache=True)
def graph_rows(n, a_chan, b_chan, a_csize, b_csize, rows):
    eq = np.int64(0)
    for p in range(n + 1):
        if a_csize[p] == b_csize[p]:
            eq |= (np.int64(1) << p) | (np.int64(1) << (n + 1 + p))
    for i in range(n):
        row = 0
        wa = a_chan[i]
        for j in range(n):
            wb = b_chan[j]
            if (wa & ~wb) == 0 and (wb & eq & ~wa) == 0:
                row |= 1 << j
        rows[i] = row


@njit(cache=True, inline="always")
def _precheck(n, a_total, a_csize, a_zcnt, a_ocnt, ia, b_total, b_csize, b_zcnt, b_ocnt, ib, counters):
    """ST1-ST3 on row ``ia`` of the a-arrays against row ``ib`` of the b-arrays."""
    counters[C_TOTAL] += 1
    if a_total[ia] > b_total[ib]:
        counters[C_ST1] += 1
        return False
    for p in range(1, n):
        if a_csize[ia, p] > b_csize[ib, p]:
            counters[C_ST2] += 1
            return False
    for p in range(1, n):
        if a_zcnt[ia, p] > b_zcnt[ib, p] or a_ocnt[ia, p] > b_ocnt[ib, p]:
            counters[C_ST3] += 1
            return False
    return True


@njit(cache=True)
def deep_test(
    n, variant,
    a_total, a_csize, a_zm, a_om, a_chan, a_outs,
    b_csize, b_zm, b_om, b_chan, b_bitmap,
    counters, st_adj, st_match, rows, witness,
):
    """Search for a subsuming permutation once the prechecks have passed."""
    if variant == VARIANT_MATCHING:
        graph_rows(n, a_chan, b_chan, a_csize, b_csize, rows)
        cover = 0
        for i in range(n):
            if rows[i] == 0:
                counters[C_NOPM] += 1
                return False
            cover |= rows[i]
        if cover != (1 << n) - 1:
            counters[C_NOPM] += 1
            return False
        found = _matching_search(n, rows, a_outs, a_total, b_bitmap, counters, st_adj, st_match, witness)
    else:
        found = _permutation_search(n, a_zm, a_om, b_zm, b_om, a_outs, a_total, b_bitmap, counters, witness)
    if found:
        counters[C_FOUND] += 1
    return found


@njit(cache=True)
def _scratch(n):
    cap = n * n + 2
    return (
        np.empty((cap, n), dtype=np.int64),
        np.empty((cap, n), dtype=np.int64),
        np.empty(n, dtype=np.int64),
        np.empty(n, dtype=np.int64),
    )


@njit(cache=True)
def test_one(n, variant, a_total, a_csize, a_zcnt, a_ocnt, a_zm, a_om, a_chan, a_outs,
             b_total, b_csize, b_zcnt, b_ocnt, b_zm, b_om, b_chan, b_bitmap, ia, ib):
    """Does row ``ia`` of the a-arrays subsume row ``ib`` of the b-arrays?"""
    counters = np.zeros(N_COUNTERS, dtype=np.int64)
    st_adj, st_match, rows, witness = _scratch(n)
    found = False
    if _precheck(n, a_total, a_csize, a_zcnt, a_ocnt, ia, b_total, b_csize, b_zcnt, b_ocnt, ib, counters):
        found = deep_test(
            n, variant,
            a_total[ia], a_csize[ia], a_zm[ia], a_om[ia], a_chan[ia], a_outs[ia],
            b_csize[ib], b_zm[ib], b_om[ib], b_chan[ib], b_bitmap[ib],
            counters, st_adj, st_match, rows, witness,
        )
    return found, witness, counters


@njit(cache=True, parallel=True)
def forward_batch(
    n, variant, snap_count,
    s_alive, s_total, s_csize, s_zcnt, s_ocnt, s_zm, s_om, s_chan, s_outs,
    c_total, c_csize, c_zcnt, c_ocnt, c_zm, c_om, c_chan, c_bitmap,
):
    """For every candidate: is it subsumed by a live entry of the snapshot?"""
    m = c_total.shape[0]
    rejected = np.zeros(m, dtype=np.uint8)
    counters = np.zeros((m, N_COUNTERS), dtype=np.int64)
    for c in prange(m):
        st_adj, st_match, rows, witness = _scratch(n)
        ctr = counters[c]
        for e in range(snap_count):
            if not s_alive[e]:
                continue
            if not _precheck(n, s_total, s_csize, s_zcnt, s_ocnt, e, c_total, c_csize, c_zcnt, c_ocnt, c, ctr):
                continue
            if deep_test(
                n, variant,
                s_total[e], s_csize[e], s_zm[e], s_om[e], s_chan[e], s_outs[e],
                c_csize[c], c_zm[c], c_om[c], c_chan[c], c_bitmap[c],
                ctr, st_adj, st_match, rows, witness,
            ):
                rejected[c] = 1
                break
    return rejected, counters


@njit(cache=True)
def merge_batch(
    n, variant, snap_count, count, rejected,
    s_alive, s_total, s_csize, s_zcnt, s_ocnt, s_zm, s_om, s_chan, s_outs, s_bitmap, s_src,
    c_total, c_csize, c_zcnt, c_ocnt, c_zm, c_om, c_chan, c_outs, c_bitmap, c_src,
    counters,
):
    """Sequentially admit batch candidates into the store.

    A candidate not already rejected against the snapshot is tested against
    entries added after the snapshot; if it survives, every live entry with a
    strictly larger output set that it subsumes is removed, and it is appended.
    Entries of equal size need no removal test: the forward test already
    decided that direction, and for equal sizes subsumption is symmetric.
    """
    st_adj, st_match, rows, witness = _scratch(n)
    width = s_outs.shape[1]
    for c in range(c_total.shape[0]):
        if rejected[c]:
            continue
        tc = c_total[c]
        dead = False
        for e in range(snap_count, count):
            if not s_alive[e]:
                continue
            if not _precheck(n, s_total, s_csize, s_zcnt, s_ocnt, e, c_total, c_csize, c_zcnt, c_ocnt, c, counters):
                continue
            if deep_test(
                n, variant,
                s_total[e], s_csize[e], s_zm[e], s_om[e], s_chan[e], s_outs[e],
                c_csize[c], c_zm[c], c_om[c], c_chan[c], c_bitmap[c],
                counters, st_adj, st_match, rows, witness,
            ):
                dead = True
                break
        if dead:
            continue
        for e in range(count):
            if not s_alive[e]:
                continue
            if s_total[e] <= tc:
                if s_total[e] < tc:
                    counters[C_TOTAL] += 1
                    counters[C_ST1] += 1
                continue
            if not _precheck(n, c_total, c_csize, c_zcnt, c_ocnt, c, s_total, s_csize, s_zcnt, s_ocnt, e, counters):
                continue
            if deep_test(
                n, variant,
                tc, c_csize[c], c_zm[c], c_om[c], c_chan[c], c_outs[c],
                s_csize[e], s_zm[e], s_om[e], s_chan[e], s_bitmap[e],
                counters, st_adj, st_match, rows, witness,
            ):
                s_alive[e] = 0
        s_alive[count] = 1
        s_total[count] = tc
        s_csize[count] = c_csize[c]
        s_zcnt[count] = c_zcnt[c]
        s_ocnt[count] = c_ocnt[c]
        s_zm[count] = c_zm[c]
        s_om[count] = c_om[c]
        s_chan[count] = c_chan[c]
        s_outs[count, :] = 0
        w = min(width, c_outs.shape[1])
        s_outs[count, :w] = c_outs[c, :w]
        s_bitmap[count] = c_bitmap[c]
        s_src[count] = c_src[c]
        count += 1
    return count


def set_workers(workers: int) -> None:
    nb.set_num_threads(max(1, min(workers, nb.config.NUMBA_NUM_THREADS)))
