"""Perfect matchings in small bipartite graphs.

Both sides are ``{0, ..., n-1}``; the adjacency of left vertex ``i`` is a bitmask
of right vertices. A matching is a tuple ``pairing`` with ``pairing[i]`` the
right partner of ``i`` (or ``-1`` when unmatched).

Enumeration follows the binary-partition scheme of Uno: starting from one
perfect matching ``M``, trim every edge that lies in no perfect matching, pick
an edge ``e`` outside ``M``, swap ``M`` along an alternating cycle through ``e``
to get ``M'``, then recurse on the graph forced to contain ``e`` (seeded with
``M'``) and on the graph without ``e`` (seeded with ``M``). Every recursive call
emits exactly one new matching, so work per matching is polynomial in ``n``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

Matching = tuple[int, ...]

BRUTE_FORCE_MAX_N = 9


@dataclass(frozen=True)
class BipartiteGraph:
    n: int
    adjacency: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.adjacency) != self.n:
            raise ValueError("adjacency must have one row per left vertex")
        full = (1 << self.n) - 1
        for row in self.adjacency:
            if row & ~full:
                raise ValueError("neighbor index out of range")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> BipartiteGraph:
        rows = [0] * n
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i},{j}) out of range")
            rows[i] |= 1 << j
        return cls(n, tuple(rows))

    @classmethod
    def complete(cls, n: int) -> BipartiteGraph:
        return cls(n, (((1 << n) - 1),) * n)

    def has_edge(self, i: int, j: int) -> bool:
        return bool((self.adjacency[i] >> j) & 1)

    def neighbors(self, i: int) -> list[int]:
        return _bits(self.adjacency[i])

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in _bits(self.adjacency[i])]


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def find_perfect_matching(g: BipartiteGraph) -> Optional[Matching]:
    """Augmenting-path (Ford-Fulkerson) search; ``None`` if no perfect matching.

    Left vertices are processed in ascending order, each growing a BFS tree over
    alternating paths with neighbors scanned in ascending order.
    """
    return _seed_matching(g.n, list(g.adjacency))


def _seed_matching(n: int, adj: list[int]) -> Optional[Matching]:
    match = [-1] * n
    match_inv = [-1] * n
    for u in range(n):
        if not adj[u]:
            return None
        parent_right = [-1] * n  # right vertex -> left vertex it was reached from
        seen = 0
        queue = deque([u])
        end = -1
        while queue and end < 0:
            x = queue.popleft()
            for v in _bits(adj[x] & ~seen):
                seen |= 1 << v
                parent_right[v] = x
                if match_inv[v] < 0:
                    end = v
                    break
                queue.append(match_inv[v])
        if end < 0:
            return None
        v = end
        while v >= 0:
            x = parent_right[v]
            prev = match[x]
            match[x] = v
            match_inv[v] = x
            v = prev if x != u else -1
    return tuple(match)


def _reach_closure(n: int, succ: list[int]) -> list[int]:
    """reach[i] = left vertices reachable from ``i`` in one or more steps."""
    reach = list(succ)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = reach[i]
            for k in _bits(reach[i]):
                acc |= reach[k]
            if acc != reach[i]:
                reach[i] = acc
                changed = True
    return reach


def _trim(n: int, adj: list[int], match: list[int]) -> list[int]:
    """Drop non-matching edges that lie on no alternating cycle."""
    match_inv = [0] * n
    for i, j in enumerate(match):
        match_inv[j] = i
    # left-vertex digraph: i -> i' when i is adjacent to the partner of i'
    succ = []
    for i in range(n):
        s = 0
        for j in _bits(adj[i] & ~(1 << match[i])):
            s |= 1 << match_inv[j]
        succ.append(s)
    reach = _reach_closure(n, succ)
    out = []
    for i in range(n):
        row = 1 << match[i]
        for j in _bits(adj[i] & ~(1 << match[i])):
            if (reach[match_inv[j]] >> i) & 1:
                row |= 1 << j
        out.append(row)
    return out


def _swap_cycle(n: int, adj: list[int], match: list[int], i: int, j: int) -> list[int]:
    """Matching obtained by switching ``match`` along an alternating cycle
    that uses the non-matching edge ``(i, j)``."""
    match_inv = [0] * n
    for a, b in enumerate(match):
        match_inv[b] = a
    start = match_inv[j]
    parent = [-1] * n
    parent[start] = start
    queue = deque([start])
    while queue:
        x = queue.popleft()
        if x == i:
            break
        for y_right in _bits(adj[x] & ~(1 << match[x])):
            y = match_inv[y_right]
            if parent[y] < 0:
                parent[y] = x
                queue.append(y)
    path = [i]
    while path[-1] != start:
        path.append(parent[path[-1]])
    path.reverse()  # start = u0 -> u1 -> ... -> um = i
    new = list(match)
    for t in range(len(path) - 1):
        new[path[t]] = match[path[t + 1]]
    new[i] = j
    return new


def _first_free_edge(n: int, adj: list[int], match: list[int]) -> tuple[int, int]:
    for i in range(n):
        rest = adj[i] & ~(1 << match[i])
        if rest:
            return i, (rest & -rest).bit_length() - 1
    return -1, -1


def enumerate_perfect_matchings(g: BipartiteGraph) -> Iterator[Matching]:
    """Lazily yield every perfect matching of ``g`` exactly once.

    The order is deterministic: the seed from :func:`find_perfect_matching`
    first, then a preorder walk of the include/exclude partition tree.
    """
    seed = find_perfect_matching(g)
    if seed is None:
        return
    yield seed
    n = g.n
    stack = [(list(g.adjacency), list(seed))]
    while stack:
        adj, match = stack.pop()
        adj = _trim(n, adj, match)
        i, j = _first_free_edge(n, adj, match)
        if i < 0:
            continue
        swapped = _swap_cycle(n, adj, match, i, j)
        yield tuple(swapped)
        without = list(adj)
        without[i] &= ~(1 << j)
        forced = [row & ~(1 << j) for row in adj]
        forced[i] = 1 << j
        stack.append((without, match))
        stack.append((forced, swapped))


def count_perfect_matchings_brute(g: BipartiteGraph) -> int:
    """Count by filtering all ``n!`` permutations (test oracle)."""
    if g.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute-force oracle limited to n <= {BRUTE_FORCE_MAX_N}")
    adj = g.adjacency
    return sum(
        all((adj[i] >> p[i]) & 1 for i in range(g.n))
        for p in itertools.permutations(range(g.n))
    )


def is_perfect_matching(g: BipartiteGraph, pairing: Matching) -> bool:
    return (
        len(pairing) == g.n
        and len(set(pairing)) == g.n
        and all(0 <= j < g.n and g.has_edge(i, j) for i, j in enumerate(pairing))
    )

