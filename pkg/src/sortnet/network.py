"""Comparator networks and their binary output sets.

Channels are 0-based. A binary sequence on ``n`` channels is an ``int`` whose
bit ``i`` holds the value on channel ``i``; textual renderings print channel 0
leftmost, so the word ``0b1100`` on 4 channels renders as ``"0011"``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

MAX_CHANNELS = 16


@dataclass(frozen=True, order=True)
class Comparator:
    low: int
    high: int

    def __post_init__(self) -> None:
        if not 0 <= self.low < self.high:
            raise ValueError(f"invalid comparator ({self.low},{self.high}): need 0 <= low < high")


@dataclass(frozen=True)
class ComparatorNetwork:
    """An ordered sequence of comparators on ``channels`` wires."""

    channels: int
    comparators: tuple[Comparator, ...] = ()

    def __post_init__(self) -> None:
        if self.channels < 1:
            raise ValueError("a network needs at least one channel")
        comps = tuple(c if isinstance(c, Comparator) else Comparator(*c) for c in self.comparators)
        for c in comps:
            if c.high >= self.channels:
                raise ValueError(f"comparator ({c.low},{c.high}) out of range for {self.channels} channels")
        object.__setattr__(self, "comparators", comps)

    @classmethod
    def of(cls, channels: int, pairs: Iterable[tuple[int, int]]) -> ComparatorNetwork:
        return cls(channels, tuple(Comparator(i, j) for i, j in pairs))

    @property
    def size(self) -> int:
        return len(self.comparators)

    def __len__(self) -> int:
        return len(self.comparators)

    def then(self, other: Comparator | ComparatorNetwork) -> ComparatorNetwork:
        """Concatenation ``self;other``."""
        if isinstance(other, Comparator):
            return ComparatorNetwork(self.channels, self.comparators + (other,))
        if other.channels != self.channels:
            raise ValueError("cannot concatenate networks with different channel counts")
        return ComparatorNetwork(self.channels, self.comparators + other.comparators)

    def pairs(self) -> list[tuple[int, int]]:
        return [(c.low, c.high) for c in self.comparators]

    def __str__(self) -> str:
        return render_network(self)


def render_sequence(x: int, n: int) -> str:
    return "".join("1" if (x >> i) & 1 else "0" for i in range(n))


def parse_sequence(text: str) -> int:
    if not text or any(ch not in "01" for ch in text):
        raise ValueError(f"not a binary sequence: {text!r}")
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


def render_network(net: ComparatorNetwork) -> str:
    return ",".join(f"{c.low}:{c.high}" for c in net.comparators)


def parse_network(text: str, channels: int | None = None) -> ComparatorNetwork:
    """Parse ``low:high,low:high,...``.

    When ``channels`` is omitted it is inferred as ``max(high) + 1``.
    """
    text = text.strip()
    pairs = []
    if text:
        for tok in text.split(","):
            lo, sep, hi = tok.strip().partition(":")
            if not sep:
                raise ValueError(f"bad comparator token {tok!r}; expected low:high")
            try:
                pairs.append((int(lo), int(hi)))
            except ValueError:
                raise ValueError(f"bad comparator token {tok!r}; expected low:high") from None
    if channels is None:
        if not pairs:
            raise ValueError("cannot infer the channel count of an empty network")
        channels = max(max(p) for p in pairs) + 1
    return ComparatorNetwork.of(channels, pairs)


def _apply_pairs(pairs: Sequence[tuple[int, int]], x: int) -> int:
    for i, j in pairs:
        # a 1 on the low channel and a 0 on the high one get exchanged
        if (x >> i) & 1 and not (x >> j) & 1:
            x ^= (1 << i) | (1 << j)
    return x


def apply(network: ComparatorNetwork, x: int) -> int:
    return _apply_pairs(network.pairs(), x)


@dataclass(frozen=True)
class OutputSet:
    """Binary outputs of a network, split into ``n + 1`` clusters by popcount.

    ``clusters[p]`` is a sorted tuple of words with exactly ``p`` ones.
    ``zeros_masks[p]`` has bit ``i`` set when some sequence of cluster ``p``
    holds a 0 on channel ``i``; ``ones_masks[p]`` likewise for 1.
    """

    n: int
    clusters: tuple[tuple[int, ...], ...]
    zeros_masks: tuple[int, ...] = field(init=False)
    ones_masks: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        if len(self.clusters) != self.n + 1:
            raise ValueError("an output set has exactly n + 1 clusters")
        full = (1 << self.n) - 1
        zeros, ones = [], []
        for cluster in self.clusters:
            z = o = 0
            for x in cluster:
                o |= x
                z |= ~x & full
            zeros.append(z)
            ones.append(o)
        object.__setattr__(self, "zeros_masks", tuple(zeros))
        object.__setattr__(self, "ones_masks", tuple(ones))

    @classmethod
    def from_words(cls, n: int, words: Iterable[int]) -> OutputSet:
        buckets: list[set[int]] = [set() for _ in range(n + 1)]
        for x in words:
            buckets[x.bit_count()].add(x)
        return cls(n, tuple(tuple(sorted(b)) for b in buckets))

    @property
    def size(self) -> int:
        return sum(len(c) for c in self.clusters)

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        for cluster in self.clusters:
            yield from cluster

    def __contains__(self, x: int) -> bool:
        return x in self.clusters[x.bit_count()]

    def cluster_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.clusters)

    def render(self) -> list[list[str]]:
        return [[render_sequence(x, self.n) for x in c] for c in self.clusters]


def outputs(network: ComparatorNetwork) -> OutputSet:
    n = network.channels
    if n > MAX_CHANNELS:
        raise ValueError(f"output sets are supported for n <= {MAX_CHANNELS}, got {n}")
    pairs = network.pairs()
    return OutputSet.from_words(n, (_apply_pairs(pairs, x) for x in range(1 << n)))


def extend_outputs(base: OutputSet, c: Comparator) -> OutputSet:
    """Output set of ``C;c`` given the output set of ``C``."""
    if c.high >= base.n:
        raise ValueError("comparator out of range")
    pair = [(c.low, c.high)]
    return OutputSet(
        base.n,
        tuple(tuple(sorted({_apply_pairs(pair, x) for x in cluster})) for cluster in base.clusters),
    )


def _render_mask(mask: int, n: int, symbol: str) -> str:
    return "".join(symbol if (mask >> i) & 1 else "*" for i in range(n))


def zeros_seq(output_set: OutputSet, p: int) -> str:
    """Rendering of the zeros set of cluster ``p``: ``0`` where some sequence
    has a zero, ``*`` elsewhere."""
    if not 0 <= p <= output_set.n:
        raise ValueError(f"cluster index {p} out of range")
    return _render_mask(output_set.zeros_masks[p], output_set.n, "0")


def ones_seq(output_set: OutputSet, p: int) -> str:
    if not 0 <= p <= output_set.n:
        raise ValueError(f"cluster index {p} out of range")
    return _render_mask(output_set.ones_masks[p], output_set.n, "1")


def is_redundant(output_set: OutputSet, c: Comparator) -> bool:
    lo, hi = 1 << c.low, 1 << c.high
    return not any(x & lo and not x & hi for x in output_set)


def is_sorting_network(output_set: OutputSet) -> bool:
    return output_set.size == output_set.n + 1


def is_sorted(x: int, n: int) -> bool:
    """Bits non-decreasing from channel 0 to channel ``n - 1``."""
    ones = x.bit_count()
    return x == ((1 << n) - 1) ^ ((1 << (n - ones)) - 1)


def sorts_all_inputs(network: ComparatorNetwork) -> bool:
    """Direct zero-one check over all ``2^n`` inputs."""
    n = network.channels
    pairs = network.pairs()
    return all(is_sorted(_apply_pairs(pairs, x), n) for x in range(1 << n))
