"""Optimal-size sorting networks by generate-and-prune.

Subsumption between comparator networks is tested either by filtered
permutation enumeration or by enumerating perfect matchings of a
bipartite compatibility graph.
"""

from sortnet.network import (
    Comparator,
    ComparatorNetwork,
    OutputSet,
    apply,
    extend_outputs,
    is_redundant,
    is_sorting_network,
    ones_seq,
    outputs,
    parse_network,
    render_network,
    zeros_seq,
)
from sortnet.matching import (
    BipartiteGraph,
    count_perfect_matchings_brute,
    enumerate_perfect_matchings,
    find_perfect_matching,
)
from sortnet.subsumption import (
    NetworkSignature,
    SubsumptionOutcome,
    build_subsumption_graph,
    check_permutation,
    precheck,
    subsumes_by_matchings,
    subsumes_by_permutations,
)
from sortnet.generate import (
    FilterSet,
    GenerationStats,
    brute_force_all,
    generate_level,
    generate_up_to,
    search_optimal_size,
)

__all__ = [
    "BipartiteGraph",
    "Comparator",
    "ComparatorNetwork",
    "FilterSet",
    "GenerationStats",
    "NetworkSignature",
    "OutputSet",
    "SubsumptionOutcome",
    "apply",
    "brute_force_all",
    "build_subsumption_graph",
    "check_permutation",
    "count_perfect_matchings_brute",
    "enumerate_perfect_matchings",
    "extend_outputs",
    "find_perfect_matching",
    "generate_level",
    "generate_up_to",
    "is_redundant",
    "is_sorting_network",
    "ones_seq",
    "outputs",
    "parse_network",
    "precheck",
    "render_network",
    "search_optimal_size",
    "subsumes_by_matchings",
    "subsumes_by_permutations",
    "zeros_seq",
]
