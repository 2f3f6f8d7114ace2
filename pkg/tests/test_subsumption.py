import itertools
import random

import numpy as np
import pytest

from sortnet import _engine as eng
from sortnet.matching import enumerate_perfect_matchings, find_perfect_matching
from sortnet.network import ComparatorNetwork, outputs, parse_network, parse_sequence
from sortnet.subsumption import (
    NetworkSignature,
    Stage,
    build_subsumption_graph,
    check_permutation,
    precheck,
    subsumes_by_matchings,
    subsumes_by_permutations,
)

SEC4_A = parse_network("0:1,1:2,0:3")
SEC4_B = parse_network("0:1,0:2,1:3")
SEC5_A = parse_network("0:1,2:3,1:3,0:4,0:2")
SEC5_B = parse_network("0:1,2:3,0:2,2:4,0:2")
FIG2_A = parse_network("0:1,2:3,1:3,1:4")
FIG2_B = parse_network("0:1,2:3,0:3,1:4")
FIG2_EDGES = {(0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2), (3, 3), (3, 4), (4, 3), (4, 4)}


def clusters(*groups):
    return tuple(tuple(sorted(parse_sequence(t) for t in g)) for g in groups)


def random_network(rng, n, k):
    pairs = [(i, j) for i in range(n - 1) for j in range(i + 1, n)]
    return ComparatorNetwork.of(n, [rng.choice(pairs) for _ in range(k)])


def random_pair(rng, n_max=6, k_max=8):
    n = rng.randint(2, n_max)
    return random_network(rng, n, rng.randint(0, k_max)), random_network(rng, n, rng.randint(0, k_max))


def test_section4_output_sets():
    assert outputs(SEC4_A).clusters == clusters(["0000"], ["0001", "0010"], ["0011", "0110"], ["0111", "1011"], ["1111"])
    assert outputs(SEC4_B).clusters == clusters(["0000"], ["0001", "0010"], ["0011", "0101"], ["0111", "1011"], ["1111"])


def test_check_permutation_examples():
    a, b = outputs(SEC4_A), outputs(SEC4_B)
    assert check_permutation((0, 1, 3, 2), a, b)
    assert check_permutation((0, 1, 2, 3), a, a)
    assert not check_permutation((0, 1, 2, 3), a, b)


def test_section5_st3_rejection():
    a, b = outputs(SEC5_A), outputs(SEC5_B)
    sa, sb = NetworkSignature.of(a), NetworkSignature.of(b)
    assert sa.total_size == 11 and sb.total_size == 12
    assert sa.ones_counts[2] == 4 and sb.ones_counts[2] == 3
    assert precheck(a, b) is Stage.ST3
    res = subsumes_by_permutations(a, b)
    assert not res.subsumes and res.rejected_by is Stage.ST3 and res.permutations_tried == 0


def test_precheck_trivial_cases():
    a = outputs(SEC5_A)
    assert precheck(a, a) is None
    assert precheck(outputs(ComparatorNetwork(5)), a) is Stage.ST1
    with pytest.raises(ValueError):
        precheck(outputs(ComparatorNetwork(4)), a)


def test_signature_invariants():
    rng = random.Random(3)
    for _ in range(50):
        net = random_network(rng, rng.randint(2, 7), rng.randint(0, 9))
        s = NetworkSignature.of(outputs(net))
        assert s.total_size == sum(s.cluster_sizes)
        assert s.zeros_counts == tuple(m.bit_count() for m in s.zeros_masks)
        assert s.ones_counts == tuple(m.bit_count() for m in s.ones_masks)


def test_permutation_variant_finds_section4_witness():
    a, b = outputs(SEC4_A), outputs(SEC4_B)
    res = subsumes_by_permutations(a, b)
    assert res.subsumes and check_permutation(res.witness, a, b)
    witnesses = [pi for pi in itertools.permutations(range(4)) if check_permutation(pi, a, b)]
    assert (0, 1, 3, 2) in witnesses
    assert res.witness == witnesses[0]


def test_identity_pair_subsumes():
    a = outputs(SEC5_A)
    for fn in (subsumes_by_permutations, subsumes_by_matchings):
        res = fn(a, a)
        assert res.subsumes
    g = build_subsumption_graph(a, a)
    assert all(g.has_edge(i, i) for i in range(5))


def test_fig2_graph_edges():
    a, b = outputs(FIG2_A), outputs(FIG2_B)
    plain = build_subsumption_graph(a, b, strengthened=False)
    assert set(plain.edges()) == FIG2_EDGES
    assert len(list(enumerate_perfect_matchings(plain))) == 4
    # every cluster has the same size in both sets, so the backward
    # conditions cut channels 1 and 3 down and no perfect matching is left
    strong = build_subsumption_graph(a, b)
    assert set(strong.edges()) < FIG2_EDGES
    assert find_perfect_matching(strong) is None
    assert not subsumes_by_permutations(a, b).subsumes


def test_strengthened_graph_is_subgraph_keeping_witnesses():
    rng = random.Random(8)
    for _ in range(300):
        x, y = random_pair(rng, 5, 7)
        a, b = outputs(x), outputs(y)
        strong = set(build_subsumption_graph(a, b).edges())
        plain = set(build_subsumption_graph(a, b, strengthened=False).edges())
        assert strong <= plain
        if a.size == b.size and precheck(a, b) is None:
            for pi in itertools.permutations(range(a.n)):
                if check_permutation(pi, a, b):
                    assert all((i, pi[i]) in strong for i in range(a.n))


def test_fig2_matching_variant_checks_at_most_four():
    a, b = outputs(FIG2_A), outputs(FIG2_B)
    res = subsumes_by_matchings(a, b)
    assert res.candidates_checked <= 4
    assert res.subsumes == subsumes_by_permutations(a, b).subsumes


def test_section4_variants_agree():
    a, b = outputs(SEC4_A), outputs(SEC4_B)
    r1, r2 = subsumes_by_permutations(a, b), subsumes_by_matchings(a, b)
    assert r1.subsumes and r2.subsumes
    assert check_permutation(r2.witness, a, b)


def test_no_perfect_matching_stage():
    rng = random.Random(11)
    seen = set()
    for _ in range(2000):
        x, y = random_pair(rng, 5, 6)
        res = subsumes_by_matchings(outputs(x), outputs(y))
        seen.add(res.rejected_by)
        if res.rejected_by is Stage.NO_PERFECT_MATCHING:
            assert res.candidates_checked == 0
    assert Stage.NO_PERFECT_MATCHING in seen


def test_variant_agreement_and_witnesses_random():
    rng = random.Random(12345)
    for _ in range(600):
        x, y = random_pair(rng, 6, 8)
        a, b = outputs(x), outputs(y)
        r1, r2 = subsumes_by_permutations(a, b), subsumes_by_matchings(a, b)
        assert r1.subsumes == r2.subsumes
        for r in (r1, r2):
            if r.subsumes:
                assert check_permutation(r.witness, a, b)
        if not r1.subsumes:
            assert r2.candidates_checked <= r1.candidates_checked
            assert r2.permutations_tried <= r1.permutations_tried


def test_mutual_subsumption_for_equal_sizes():
    rng = random.Random(99)
    hits = 0
    for _ in range(3000):
        x, y = random_pair(rng, 5, 7)
        a, b = outputs(x), outputs(y)
        if a.size != b.size:
            continue
        ab, ba = subsumes_by_matchings(a, b).subsumes, subsumes_by_matchings(b, a).subsumes
        assert ab == ba
        hits += ab
    assert hits > 0


def test_every_witness_is_a_graph_matching():
    rng = random.Random(5)
    checked = 0
    for _ in range(400):
        x, y = random_pair(rng, 5, 7)
        a, b = outputs(x), outputs(y)
        if precheck(a, b) is not None:
            continue
        g = build_subsumption_graph(a, b)
        for pi in itertools.permutations(range(a.n)):
            if check_permutation(pi, a, b):
                assert all(g.has_edge(i, pi[i]) for i in range(a.n))
                checked += 1
    assert checked > 0


def _arrays(nets, n):
    arr = np.array([net.pairs() for net in nets], dtype=np.int8).reshape(len(nets), nets[0].size, 2)
    bitmap = eng.bitmaps_from_networks(arr, n)
    total, outs, csize, zm, om, zc, oc, chan = eng.summarize(bitmap, n, eng.cluster_order(n))
    return total, csize, zc, oc, zm, om, chan, outs, bitmap


def test_compiled_kernel_matches_library():
    rng = random.Random(2025)
    for _ in range(400):
        n = rng.randint(2, 6)
        k = rng.randint(0, 8)
        x, y = random_network(rng, n, k), random_network(rng, n, k)
        a, b = outputs(x), outputs(y)
        A = _arrays([x], n)
        B = _arrays([y], n)
        for code, fn in ((eng.VARIANT_PERMUTATION, subsumes_by_permutations), (eng.VARIANT_MATCHING, subsumes_by_matchings)):
            found, witness, ctr = eng.test_one(n, code, *A[:8], *B[:7], B[8], 0, 0)
            ref = fn(a, b)
            assert found == ref.subsumes
            if found:
                assert tuple(int(v) for v in witness) == ref.witness
            if ref.rejected_by in (None, Stage.EXHAUSTED, Stage.NO_PERFECT_MATCHING):
                assert ctr[eng.C_VERIFIED] == ref.candidates_checked
                assert ctr[eng.C_TRIED] == ref.permutations_tried
