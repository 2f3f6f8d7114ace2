"""Generate-and-prune construction of complete sets of filters.

Level ``k`` is built from level ``k - 1`` by appending every non-redundant
comparator to every network, keeping a candidate only if nothing already kept
subsumes it, and dropping kept networks the new candidate subsumes.
Candidates are visited in ``(parent position, low, high)`` order.

The heavy lifting happens in :mod:`sortnet._engine`. Candidates are processed
in fixed-size batches: each batch is first tested in parallel against a frozen
snapshot of the current set, then merged one by one, re-testing only against
entries added since the snapshot. Because subsumption is transitive this gives
exactly the result of the one-at-a-time algorithm, for any worker count.
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from sortnet import _engine as eng
from sortnet.network import Comparator, ComparatorNetwork, outputs, sorts_all_inputs
from sortnet.subsumption import NetworkSignature, subsumes

log = logging.getLogger(__name__)

BATCH_SIZE = 256
MAX_SEARCH_CHANNELS = 11
BRUTE_FORCE_LIMIT = 10**7
VARIANTS = {"permutation": eng.VARIANT_PERMUTATION, "matching": eng.VARIANT_MATCHING}


@dataclass(frozen=True)
class FilterEntry:
    network: ComparatorNetwork
    output_set: object
    signature: NetworkSignature
    stable_id: int


class FilterSet:
    """The networks of one level, in insertion order.

    ``networks`` is an ``(m, k, 2)`` int8 array of comparator channels. Output
    sets are computed on demand and cached.
    """

    def __init__(self, n: int, k: int, networks: np.ndarray, bitmap: Optional[np.ndarray] = None):
        networks = np.asarray(networks, dtype=np.int8)
        if networks.ndim != 3 or networks.shape[1:] != (k, 2):
            raise ValueError(f"networks must have shape (m, {k}, 2)")
        if k and (networks.size and (networks[..., 0] >= networks[..., 1]).any()):
            raise ValueError("comparators must satisfy low < high")
        if networks.size and networks.max(initial=0) >= n:
            raise ValueError("comparator channel out of range")
        self.n = n
        self.k = k
        self.networks = networks
        self._bitmap = bitmap
        self._summary = None

    @classmethod
    def empty_network(cls, n: int) -> FilterSet:
        return cls(n, 0, np.zeros((1, 0, 2), dtype=np.int8))

    @classmethod
    def from_networks(cls, n: int, k: int, nets: list[ComparatorNetwork]) -> FilterSet:
        arr = np.array([net.pairs() for net in nets], dtype=np.int8).reshape(len(nets), k, 2)
        return cls(n, k, arr)

    def __len__(self) -> int:
        return self.networks.shape[0]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FilterSet)
            and (self.n, self.k) == (other.n, other.k)
            and np.array_equal(self.networks, other.networks)
        )

    def network(self, index: int) -> ComparatorNetwork:
        return ComparatorNetwork.of(self.n, (tuple(map(int, c)) for c in self.networks[index]))

    def __iter__(self) -> Iterator[ComparatorNetwork]:
        for r in range(len(self)):
            yield self.network(r)

    def bitmaps(self) -> np.ndarray:
        if self._bitmap is None:
            self._bitmap = eng.bitmaps_from_networks(self.networks, self.n)
        return self._bitmap

    def summary(self):
        if self._summary is None:
            self._summary = eng.summarize(self.bitmaps(), self.n, eng.cluster_order(self.n))
        return self._summary

    def output_sizes(self) -> np.ndarray:
        return self.bitmaps().sum(axis=1)

    def entries(self) -> list[FilterEntry]:
        out = []
        for r, net in enumerate(self):
            o = outputs(net)
            out.append(FilterEntry(net, o, NetworkSignature.of(o), r))
        return out

    def sorting_indices(self) -> list[int]:
        return [int(r) for r in np.flatnonzero(self.output_sizes() == self.n + 1)]


@dataclass
class GenerationStats:
    level: int
    size: int = 0
    candidates: int = 0
    redundant_skipped: int = 0
    total_checks: int = 0
    subsumptions_found: int = 0
    permutations_checked: int = 0
    permutations_tried: int = 0
    prechecks_rejected: dict = field(default_factory=lambda: {"ST1": 0, "ST2": 0, "ST3": 0})
    no_perfect_matching: int = 0
    exhausted: int = 0
    elapsed: float = 0.0

    def add_counters(self, counters: np.ndarray) -> None:
        c = [int(v) for v in counters]
        self.total_checks += c[eng.C_TOTAL]
        self.subsumptions_found += c[eng.C_FOUND]
        self.permutations_checked += c[eng.C_VERIFIED]
        self.permutations_tried += c[eng.C_TRIED]
        self.prechecks_rejected["ST1"] += c[eng.C_ST1]
        self.prechecks_rejected["ST2"] += c[eng.C_ST2]
        self.prechecks_rejected["ST3"] += c[eng.C_ST3]
        self.no_perfect_matching += c[eng.C_NOPM]
        self.exhausted += c[eng.C_EXHAUSTED]

    def record(self) -> dict:
        return {
            "level": self.level,
            "size": self.size,
            "candidates": self.candidates,
            "redundantSkipped": self.redundant_skipped,
            "totalChecks": self.total_checks,
            "subsumptionsFound": self.subsumptions_found,
            "permutationsChecked": self.permutations_checked,
            "permutationsTried": self.permutations_tried,
            "precheckRejects": dict(self.prechecks_rejected),
            "noPerfectMatching": self.no_perfect_matching,
            "exhausted": self.exhausted,
            "elapsedMillis": round(self.elapsed * 1000.0, 3),
        }


class _Store:
    """Growable columnar storage for the level under construction."""

    def __init__(self, n: int, width: int, capacity: int = 1024):
        self.n = n
        self.width = width
        self.count = 0
        self._alloc(capacity)

    def _alloc(self, cap: int) -> None:
        n = self.n
        self.alive = np.zeros(cap, dtype=np.uint8)
        self.total = np.zeros(cap, dtype=np.int32)
        self.csize = np.zeros((cap, n + 1), dtype=np.int32)
        self.zcnt = np.zeros((cap, n + 1), dtype=np.int32)
        self.ocnt = np.zeros((cap, n + 1), dtype=np.int32)
        self.zm = np.zeros((cap, n + 1), dtype=np.int64)
        self.om = np.zeros((cap, n + 1), dtype=np.int64)
        self.chan = np.zeros((cap, n), dtype=np.int64)
        self.outs = np.zeros((cap, self.width), dtype=np.int32)
        self.bitmap = np.zeros((cap, 1 << n), dtype=np.uint8)
        self.src = np.zeros((cap, 3), dtype=np.int64)

    def reserve(self, extra: int) -> None:
        cap = self.alive.shape[0]
        if self.count + extra <= cap:
            return
        new_cap = max(2 * cap, self.count + extra)
        old = {name: getattr(self, name) for name in self._columns}
        self._alloc(new_cap)
        for name, arr in old.items():
            getattr(self, name)[: self.count] = arr[: self.count]

    _columns = ("alive", "total", "csize", "zcnt", "ocnt", "zm", "om", "chan", "outs", "bitmap", "src")

    def live(self) -> np.ndarray:
        return np.flatnonzero(self.alive[: self.count])


def _chunk_parents(n: int) -> int:
    pairs = n * (n - 1) // 2
    return max(1, (48 << 20) // (pairs * (1 << n)))


def generate_level(
    prev: FilterSet,
    variant: str = "matching",
    workers: int = 1,
) -> tuple[FilterSet, GenerationStats]:
    """Build level ``prev.k + 1`` from ``prev``."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    n = prev.n
    if n < 2:
        raise ValueError("need at least two channels")
    code = VARIANTS[variant]
    eng.set_workers(workers)
    start = time.perf_counter()
    stats = GenerationStats(level=prev.k + 1)
    parents_bitmap = prev.bitmaps()
    width = max(2, int(parents_bitmap.sum(axis=1).max(initial=0)))
    store = _Store(n, width)
    order = eng.cluster_order(n)
    merge_counters = np.zeros(eng.N_COUNTERS, dtype=np.int64)
    step = _chunk_parents(n)
    for lo in range(0, len(prev), step):
        cand_bitmap, parent_idx, low, high, redundant = eng.expand(parents_bitmap[lo : lo + step], n)
        stats.redundant_skipped += redundant
        stats.candidates += len(parent_idx)
        if not len(parent_idx):
            continue
        total, outs, csize, zm, om, zcnt, ocnt, chan = eng.summarize(cand_bitmap, n, order)
        src = np.stack([parent_idx + lo, low, high], axis=1).astype(np.int64)
        for b in range(0, len(total), BATCH_SIZE):
            sl = slice(b, b + BATCH_SIZE)
            store.reserve(BATCH_SIZE)
            snap = store.count
            rejected, fwd = eng.forward_batch(
                n, code, snap,
                store.alive, store.total, store.csize, store.zcnt, store.ocnt,
                store.zm, store.om, store.chan, store.outs,
                total[sl], csize[sl], zcnt[sl], ocnt[sl], zm[sl], om[sl], chan[sl], cand_bitmap[sl],
            )
            stats.add_counters(fwd.sum(axis=0))
            store.count = eng.merge_batch(
                n, code, snap, store.count, rejected,
                store.alive, store.total, store.csize, store.zcnt, store.ocnt,
                store.zm, store.om, store.chan, store.outs, store.bitmap, store.src,
                total[sl], csize[sl], zcnt[sl], ocnt[sl], zm[sl], om[sl], chan[sl], outs[sl],
                cand_bitmap[sl], src[sl],
                merge_counters,
            )
    stats.add_counters(merge_counters)
    keep = store.live()
    src = store.src[keep]
    nets = np.empty((len(keep), prev.k + 1, 2), dtype=np.int8)
    nets[:, : prev.k] = prev.networks[src[:, 0]]
    nets[:, prev.k, 0] = src[:, 1]
    nets[:, prev.k, 1] = src[:, 2]
    result = FilterSet(n, prev.k + 1, nets, bitmap=store.bitmap[keep].copy())
    stats.size = len(result)
    stats.elapsed = time.perf_counter() - start
    log.info("n=%d k=%d size=%d checks=%d elapsed=%.2fs", n, result.k, len(result), stats.total_checks, stats.elapsed)
    return result, stats


def generate_up_to(
    n: int,
    k_max: int,
    variant: str = "matching",
    workers: int = 1,
    *,
    stop_at_sorting: bool = False,
    start: Optional[FilterSet] = None,
) -> Iterator[tuple[FilterSet, GenerationStats]]:
    """Yield levels ``start.k + 1 ... k_max`` (from the empty network by default).

    With ``stop_at_sorting`` the walk ends after the first level that contains
    a sorting network.
    """
    if not 2 <= n <= MAX_SEARCH_CHANNELS:
        raise ValueError(f"n must lie in [2, {MAX_SEARCH_CHANNELS}]")
    level = start if start is not None else FilterSet.empty_network(n)
    if level.n != n:
        raise ValueError("resume level has a different channel count")
    while level.k < k_max:
        level, stats = generate_level(level, variant, workers)
        yield level, stats
        if stop_at_sorting and level.sorting_indices():
            return


class SearchFailed(RuntimeError):
    pass


def search_optimal_size(
    n: int,
    variant: str = "matching",
    workers: int = 1,
    k_ceiling: int = 64,
    on_level: Optional[Callable[[FilterSet, GenerationStats], None]] = None,
) -> tuple[int, ComparatorNetwork]:
    """Smallest ``k`` whose filter set holds a sorting network, with a witness."""
    for level, stats in generate_up_to(n, k_ceiling, variant, workers, stop_at_sorting=True):
        if on_level is not None:
            on_level(level, stats)
        found = level.sorting_indices()
        if found:
            witness = level.network(found[0])
            if not sorts_all_inputs(witness):
                raise AssertionError(f"witness {witness} fails the zero-one check")
            return level.k, witness
    raise SearchFailed(f"no sorting network on {n} channels with at most {k_ceiling} comparators")


def brute_force_all(n: int, k: int) -> list[ComparatorNetwork]:
    """Every network with ``n`` channels and ``k`` comparators, lexicographically."""
    pairs = [(i, j) for i in range(n - 1) for j in range(i + 1, n)]
    if len(pairs) ** k > BRUTE_FORCE_LIMIT:
        raise ValueError(f"{len(pairs)}^{k} networks exceed the brute-force limit")
    return [ComparatorNetwork.of(n, combo) for combo in itertools.product(pairs, repeat=k)]


def generate_level_reference(
    prev: list[ComparatorNetwork], n: int, variant: str = "matching"
) -> list[ComparatorNetwork]:
    """One-at-a-time generate-and-prune on plain Python objects (slow; small n)."""
    from sortnet.network import extend_outputs, is_redundant

    kept: list[tuple[ComparatorNetwork, object]] = []
    for net in prev:
        base = outputs(net)
        for i in range(n - 1):
            for j in range(i + 1, n):
                c = Comparator(i, j)
                if is_redundant(base, c):
                    continue
                cand = extend_outputs(base, c)
                if any(subsumes(o, cand, variant).subsumes for _, o in kept):
                    continue
                kept = [(k_net, o) for k_net, o in kept if not subsumes(cand, o, variant).subsumes]
                kept.append((net.then(c), cand))
    return [net for net, _ in kept]
