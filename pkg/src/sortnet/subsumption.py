"""Subsumption between comparator networks.

``C_a`` subsumes ``C_b`` when some channel permutation maps every output of
``C_a`` into the output set of ``C_b``. A permutation is a tuple ``pi`` where
``pi[i]`` is the destination of channel ``i``: applying it moves the bit on
channel ``i`` to channel ``pi[i]``. Under this convention a subsuming
permutation, read as ``i -> pi[i]``, is a perfect matching of the subsumption
graph.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Optional

from sortnet.matching import BipartiteGraph, enumerate_perfect_matchings
from sortnet.network import OutputSet

Permutation = tuple[int, ...]


class Stage(str, enum.Enum):
    ST1 = "ST1"
    ST2 = "ST2"
    ST3 = "ST3"
    NO_PERFECT_MATCHING = "no-perfect-matching"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class NetworkSignature:
    n: int
    total_size: int
    cluster_sizes: tuple[int, ...]
    zeros_masks: tuple[int, ...]
    zeros_counts: tuple[int, ...]
    ones_masks: tuple[int, ...]
    ones_counts: tuple[int, ...]

    @classmethod
    def of(cls, out: OutputSet) -> NetworkSignature:
        return cls(
            n=out.n,
            total_size=out.size,
            cluster_sizes=out.cluster_sizes(),
            zeros_masks=out.zeros_masks,
            zeros_counts=tuple(m.bit_count() for m in out.zeros_masks),
            ones_masks=out.ones_masks,
            ones_counts=tuple(m.bit_count() for m in out.ones_masks),
        )


@dataclass(frozen=True)
class SubsumptionOutcome:
    subsumes: bool
    witness: Optional[Permutation] = None
    rejected_by: Optional[Stage] = None
    candidates_checked: int = 0
    """Permutations verified against the full output-set inclusion."""
    permutations_tried: int = 0
    """Permutations enumerated: all ST4-tested ones for the permutation
    variant, all yielded matchings for the matching variant."""


def _signature(x: OutputSet | NetworkSignature) -> NetworkSignature:
    return x if isinstance(x, NetworkSignature) else NetworkSignature.of(x)


def precheck(a: OutputSet | NetworkSignature, b: OutputSet | NetworkSignature) -> Optional[Stage]:
    """Cheap necessary conditions for ``a`` subsuming ``b``.

    Returns the first failing stage, or ``None`` when all pass (which does not
    imply subsumption).
    """
    sa, sb = _signature(a), _signature(b)
    if sa.n != sb.n:
        raise ValueError(f"channel counts differ: {sa.n} vs {sb.n}")
    if sa.total_size > sb.total_size:
        return Stage.ST1
    if any(x > y for x, y in zip(sa.cluster_sizes, sb.cluster_sizes)):
        return Stage.ST2
    if any(x > y for x, y in zip(sa.zeros_counts, sb.zeros_counts)) or any(
        x > y for x, y in zip(sa.ones_counts, sb.ones_counts)
    ):
        return Stage.ST3
    return None


def permute_word(pi: Permutation, x: int) -> int:
    y = 0
    for i, target in enumerate(pi):
        if (x >> i) & 1:
            y |= 1 << target
    return y


def check_permutation(pi: Permutation, a: OutputSet, b: OutputSet) -> bool:
    """Whether ``pi`` maps every output of ``a`` into the same cluster of ``b``."""
    if a.n != b.n or len(pi) != a.n:
        raise ValueError("permutation and output sets must agree on n")
    for cluster_a, cluster_b in zip(a.clusters, b.clusters):
        target = set(cluster_b)
        if any(permute_word(pi, x) not in target for x in cluster_a):
            return False
    return True


def _passes_st4(pi: Permutation, a: OutputSet, b: OutputSet) -> bool:
    for p in range(a.n + 1):
        if permute_word(pi, a.zeros_masks[p]) & ~b.zeros_masks[p]:
            return False
        if permute_word(pi, a.ones_masks[p]) & ~b.ones_masks[p]:
            return False
    return True


def subsumes_by_permutations(a: OutputSet, b: OutputSet) -> SubsumptionOutcome:
    """Try all ``n!`` permutations in lexicographic order, filtering each by
    zeros/ones inclusion before the full check."""
    stage = precheck(a, b)
    if stage is not None:
        return SubsumptionOutcome(False, rejected_by=stage)
    tried = checked = 0
    for pi in itertools.permutations(range(a.n)):
        tried += 1
        if not _passes_st4(pi, a, b):
            continue
        checked += 1
        if check_permutation(pi, a, b):
            return SubsumptionOutcome(True, pi, None, checked, tried)
    return SubsumptionOutcome(False, None, Stage.EXHAUSTED, checked, tried)


def build_subsumption_graph(a: OutputSet, b: OutputSet, strengthened: bool = True) -> BipartiteGraph:
    """Bipartite graph with an edge ``(i, j)`` when channel ``i`` of ``a`` can be
    sent to channel ``j`` of ``b`` without breaking zeros/ones inclusion.

    With ``strengthened`` (the default, and what the search uses) the inclusion
    must also hold backwards for every cluster whose size is the same in both
    sets. The plain graph is a supergraph with the same verified matchings.
    """
    if a.n != b.n:
        raise ValueError(f"channel counts differ: {a.n} vs {b.n}")
    n = a.n
    equal = [strengthened and len(ca) == len(cb) for ca, cb in zip(a.clusters, b.clusters)]
    rows = []
    for i in range(n):
        row = 0
        for j in range(n):
            ok = True
            for p in range(n + 1):
                ia_z = (a.zeros_masks[p] >> i) & 1
                jb_z = (b.zeros_masks[p] >> j) & 1
                ia_o = (a.ones_masks[p] >> i) & 1
                jb_o = (b.ones_masks[p] >> j) & 1
                if (ia_z and not jb_z) or (ia_o and not jb_o):
                    ok = False
                    break
                if equal[p] and ((jb_z and not ia_z) or (jb_o and not ia_o)):
                    ok = False
                    break
            if ok:
                row |= 1 << j
        rows.append(row)
    return BipartiteGraph(n, tuple(rows))


def subsumes_by_matchings(a: OutputSet, b: OutputSet) -> SubsumptionOutcome:
    """Verify only permutations that are perfect matchings of the subsumption
    graph, stopping at the first one that passes."""
    stage = precheck(a, b)
    if stage is not None:
        return SubsumptionOutcome(False, rejected_by=stage)
    graph = build_subsumption_graph(a, b)
    checked = 0
    for pi in enumerate_perfect_matchings(graph):
        checked += 1
        if check_permutation(pi, a, b):
            return SubsumptionOutcome(True, pi, None, checked, checked)
    stage = Stage.NO_PERFECT_MATCHING if checked == 0 else Stage.EXHAUSTED
    return SubsumptionOutcome(False, None, stage, checked, checked)


def subsumes(a: OutputSet, b: OutputSet, variant: str = "matching") -> SubsumptionOutcome:
    if variant == "matching":
        return subsumes_by_matchings(a, b)
    if variant == "permutation":
        return subsumes_by_permutations(a, b)
    raise ValueError(f"unknown variant {variant!r}")
