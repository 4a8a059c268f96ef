"""Embedding a perfect necklace over A into one over A ∪ {sigma}.

Given the pointed Eulerian cycle of an (n,k)-perfect necklace over A, the
construction partitions the sigma-touching edges of the larger astute graph
into petals (simple cycles indexed by necklace classes of (word, residue)
pairs), organizes the petals into a spanning tree, schedules one petal
insertion per section of the input cycle through a perfect matching of the
distribution graph, and splices everything into a single Eulerian cycle of
the graph over the extended alphabet.  Every run of n + 2|A| - 2 consecutive
output symbols then meets the new symbol whenever k divides n.
"""
from __future__ import annotations

import math
import sys
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .analysis import is_perfect, is_subsequence, sigma_gaps
from .errors import HallViolation, NormweaveError, PetalCoverageError
from .necklaces import (
    Necklace,
    PointedEulerianCycle,
    cycle_from_word,
    eulerian_perfect_necklace,
)
from .words import Alphabet, Word


@dataclass(frozen=True)
class Section:
    """One run of |A| consecutive edges of a pointed Eulerian cycle."""

    index: int
    vertex_heads: tuple  # (head word value, residue) per edge, in order


@dataclass
class DistributionGraph:
    """Bipartite incidence of graph vertices against cycle sections."""

    vertices: list
    section_heads: list  # per section: list of head vertices (with repeats)

    def adjacency(self) -> dict:
        adj = {}
        for j, heads in enumerate(self.section_heads):
            adj[j] = sorted(set(heads))
        return adj

    def multiplicity(self, vertex) -> int:
        return sum(heads.count(vertex) for heads in self.section_heads)


@dataclass
class PetalsTree:
    """Spanning forest of the sigma-containing necklace classes.

    ``parent`` maps a class key to its parent class key, or to None for the
    classes with exactly one sigma (children of the root cycle).
    """

    n: int
    k: int
    parent: dict
    levels: list = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.parent)

    def children(self, key) -> list:
        return sorted(c for c, p in self.parent.items() if p == key)


class NecklacePair:
    """A (word, residue) pair up to simultaneous rotation.

    Rotating the word one step to the left increments the residue by one
    mod k; the class is the orbit of that action and corresponds to one
    simple cycle of the astute graph.
    """

    __slots__ = ("n", "k", "b", "word_value", "residue")

    def __init__(self, b: int, n: int, k: int, word_value: int, residue: int):
        self.b = b
        self.n = n
        self.k = k
        self.word_value = word_value
        self.residue = residue % k

    def members(self) -> list[tuple[int, int]]:
        out = []
        seen = set()
        w, m = self.word_value, self.residue
        top = self.b ** (self.n - 1)
        while (w, m) not in seen:
            seen.add((w, m))
            out.append((w, m))
            w = (w % top) * self.b + w // top
            m = (m + 1) % self.k
        return out

    def key(self) -> tuple[int, int]:
        return min(self.members())

    def orbit_len(self) -> int:
        return len(self.members())


class _ClassIndex:
    """Memoized canonical keys and orbit lengths for (word, residue) pairs."""

    def __init__(self, b: int, n: int, k: int):
        self.b = b
        self.n = n
        self.k = k
        self.top = b ** (n - 1)
        self._word_info: dict[int, tuple[int, tuple[int, ...], int]] = {}

    def _info(self, w: int) -> tuple[int, tuple[int, ...], int]:
        """(min rotation value, offsets attaining it within one period, period)."""
        cached = self._word_info.get(w)
        if cached is not None:
            return cached
        b, n, top = self.b, self.n, self.top
        vals = []
        x = w
        for _ in range(n):
            vals.append(x)
            x = (x % top) * b + x // top
        period = next(t for t in range(1, n + 1) if vals[t % n] == vals[0])
        vmin = min(vals[:period])
        offs = tuple(t for t in range(period) if vals[t] == vmin)
        info = (vmin, offs, period)
        self._word_info[w] = info
        return info

    def key(self, w: int, m: int) -> tuple[int, int]:
        vmin, offs, period = self._info(w)
        g = math.gcd(period, self.k)
        return (vmin, min((m + t) % g for t in offs))

    def orbit_len(self, w: int) -> int:
        _, _, period = self._info(w)
        return period * self.k // math.gcd(period, self.k)


def sections(cycle: PointedEulerianCycle) -> list[Section]:
    """Partition the cycle's edges into runs of |A|, collecting edge heads."""
    b = cycle.graph.alphabet.size
    heads = list(_iter_heads(cycle))
    if len(heads) % b:
        raise NormweaveError("edge count is not divisible by the alphabet size")
    return [
        Section(index=j, vertex_heads=tuple(heads[j * b : (j + 1) * b]))
        for j in range(len(heads) // b)
    ]


def _iter_heads(cycle: PointedEulerianCycle) -> Iterator[tuple[int, int]]:
    """Heads as (word value, residue); word values use the input base."""
    b = cycle.graph.alphabet.size
    n = cycle.graph.word_len_n
    k = cycle.graph.modulus_k
    data = cycle.word.data
    L = len(data)
    if n == 0:
        for i in range(L):
            yield (0, i % k)
        return
    mod = b**n
    val = 0
    for j in range(L - n, L):  # window ending at the last position (wraps)
        val = (val * b + data[j]) % mod
    for i in range(L):
        val = (val * b + data[i]) % mod
        yield (val, i % k)


def build_distribution_graph(cycle: PointedEulerianCycle) -> DistributionGraph:
    secs = sections(cycle)
    k = cycle.graph.modulus_k
    b = cycle.graph.alphabet.size
    n = cycle.graph.word_len_n
    vertices = [(w, m) for w in range(b**n) for m in range(k)]
    return DistributionGraph(
        vertices=vertices,
        section_heads=[list(s.vertex_heads) for s in secs],
    )


def distribution_matching(cycle: PointedEulerianCycle) -> dict[int, tuple[int, int]]:
    """Perfect matching section -> vertex via Hopcroft-Karp.

    Sections are processed in ascending index and adjacency lists in
    canonical vertex order, so the result is deterministic.
    """
    graph = build_distribution_graph(cycle)
    adj = graph.adjacency()
    match = _hopcroft_karp(list(range(len(graph.section_heads))), adj)
    if len(match) != len(graph.section_heads) or len(set(match.values())) != len(match):
        raise HallViolation(
            "Hall violation: distribution graph has no perfect matching"
        )
    return match


def _hopcroft_karp(lefts: list, adj: dict) -> dict:
    INF = float("inf")
    pair_left: dict = {}
    pair_right: dict = {}
    dist: dict = {}

    def bfs() -> bool:
        queue = deque()
        for u in lefts:
            if u not in pair_left:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        reachable = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = pair_right.get(v)
                if w is None:
                    reachable = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return reachable

    def dfs(u) -> bool:
        for v in adj[u]:
            w = pair_right.get(v)
            if w is None or (dist[w] == dist[u] + 1 and dfs(w)):
                pair_left[u] = v
                pair_right[v] = u
                return True
        dist[u] = INF
        return False

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 10_000))
    try:
        while bfs():
            for u in lefts:
                if u not in pair_left:
                    dfs(u)
    finally:
        sys.setrecursionlimit(old_limit)
    return pair_left


def build_petals_tree(
    alphabet_hat: Alphabet, n: int, k: int, root_cycle: Optional[PointedEulerianCycle] = None
) -> PetalsTree:
    """Spanning tree over all sigma-containing necklace classes of length-n
    words over the extended alphabet.

    Level 1 holds the classes [u*sigma, m]; level t attaches each class with
    t sigmas to the first discovered parent with t-1 sigmas whose cycle
    passes through one of its entry vertices.  Parents are scanned in
    canonical key order and candidate children assigned in key order.
    """
    bh = alphabet_hat.size
    b = bh - 1  # sigma is the last-indexed symbol
    sig = bh - 1
    idx = _ClassIndex(bh, n, k)
    top = bh ** (n - 1)

    def sigma_count(w: int) -> int:
        c = 0
        for _ in range(n):
            w, d = divmod(w, bh)
            c += d == sig
        return c

    parent: dict = {}
    levels: list[list] = []
    current: list[tuple[tuple[int, int], int, int]] = []  # (key, entry word, entry res)
    seen_l1 = set()
    for u in range(b ** (n - 1)):
        # re-encode the A-word u into base bh digits
        w = 0
        x = u
        digs = []
        for _ in range(n - 1):
            x, d = divmod(x, b)
            digs.append(d)
        for d in reversed(digs):
            w = w * bh + d
        w = w * bh + sig
        for m in range(k):
            key = idx.key(w, m)
            if key not in seen_l1:
                seen_l1.add(key)
                parent[key] = None
                current.append((key, w, m))
    levels.append(sorted(k_ for k_, _, _ in current))

    for level in range(2, n + 1):
        nxt: list[tuple[tuple[int, int], int, int]] = []
        for key, w0, m0 in sorted(current):
            candidates: dict[tuple[int, int], tuple[int, int]] = {}
            w, m = w0, m0
            for _ in range(idx.orbit_len(w0)):
                head = w % top
                m = (m + 1) % k
                w = head * bh + w // top
                child_word = head * bh + sig
                if sigma_count(child_word) == level:
                    ck = idx.key(child_word, m)
                    if ck not in parent and ck not in candidates:
                        candidates[ck] = (child_word, m)
            for ck in sorted(candidates):
                if ck not in parent:
                    parent[ck] = key
                    nxt.append((ck, *candidates[ck]))
        if not nxt:
            break
        levels.append(sorted(k_ for k_, _, _ in nxt))
        current = nxt

    return PetalsTree(n=n, k=k, parent=parent, levels=levels)


@dataclass
class LiberalResult:
    """Output of one liberal insertion, with its verification data."""

    word: Word
    order_n: int
    multiplicity_k: int
    sigma: str
    max_gap: int
    gap_bound: int
    gap_bound_holds: bool
    subsequence_ok: bool
    inserted_classes: int
    petal_spans: list  # 0-based [start, end) output ranges of inserted petals

    @property
    def necklace(self) -> Necklace:
        return Necklace(self.word, self.order_n, self.multiplicity_k)


def liberal_insert(
    source: Word | Necklace,
    sigma: str,
    n: Optional[int] = None,
    k: Optional[int] = None,
    cycle: Optional[PointedEulerianCycle] = None,
    trusted: bool = False,
) -> LiberalResult:
    """Embed an (n,k)-perfect necklace over A into one over A ∪ {sigma}.

    The input word is a (linear) subsequence of the output; the output is
    (n,k)-perfect over the extended alphabet.  The circular gap between
    consecutive sigmas is reported against the bound n + 2|A| - 2, which the
    construction guarantees when k divides n.
    """
    if isinstance(source, Necklace):
        word = source.word
        n = source.order_n if n is None else n
        k = source.multiplicity_k if k is None else k
    else:
        word = source
    if n is None or k is None:
        raise NormweaveError("order n and multiplicity k are required")
    if sigma in word.alphabet:
        raise NormweaveError(f"sigma {sigma!r} must not belong to the input alphabet")
    if cycle is None:
        cycle = cycle_from_word(word, n, k)  # validates perfectness
    elif not trusted:
        report = is_perfect(word, n, k)
        if not report.ok:
            raise NormweaveError("input is not perfect")

    alphabet = word.alphabet
    hat = alphabet.extend(sigma)
    out_syms, inserted_count, spans = _liberal_traverse(cycle, hat)
    out_word = Word(hat, out_syms)

    bound = n + 2 * alphabet.size - 2
    gaps = sigma_gaps(out_word.text, sigma, mode="circular")
    sub_ok, _ = is_subsequence(word.text, out_word.text)
    return LiberalResult(
        word=out_word,
        order_n=n,
        multiplicity_k=k,
        sigma=sigma,
        max_gap=gaps.max_gap,
        gap_bound=bound,
        gap_bound_holds=gaps.max_gap <= bound,
        subsequence_ok=sub_ok,
        inserted_classes=inserted_count,
        petal_spans=spans,
    )


def _liberal_traverse(
    cycle: PointedEulerianCycle, hat: Alphabet
) -> tuple[list[int], int, list[tuple[int, int]]]:
    """Walk the input cycle, splicing petals per the matched sections.

    Emits the output as symbol indices over the extended alphabet.  Edge i
    of the input is emitted first, then the petal scheduled at its head (if
    any); hence the input word is a linear subsequence of the output.
    """
    alphabet = cycle.graph.alphabet
    b = alphabet.size
    n = cycle.graph.word_len_n + 1  # output perfectness order
    k = cycle.graph.modulus_k
    bh = hat.size
    sig = bh - 1
    idx = _ClassIndex(bh, n, k)
    tree = build_petals_tree(hat, n, k, cycle)
    matching = distribution_matching(cycle)

    top = bh ** (n - 1)
    data = cycle.word.data
    L = len(data)

    out: list[int] = []
    inserted: set = set()
    section_done = [False] * (L // b)
    parent = tree.parent

    def walk_petal(w0: int, m0: int, ck) -> None:
        # iterative so deep sigma-nesting cannot hit the recursion limit
        stack = [(w0, m0, idx.orbit_len(w0), ck)]
        while stack:
            w, m, left, cls = stack.pop()
            while left:
                out.append(w % bh)
                head = w % top
                m = (m + 1) % k
                w = head * bh + w // top
                left -= 1
                if left:
                    child = head * bh + sig
                    ck2 = idx.key(child, m)
                    if parent.get(ck2, -1) == cls and ck2 not in inserted:
                        inserted.add(ck2)
                        stack.append((w, m, left, cls))
                        w, m, left, cls = child, m, idx.orbit_len(child), ck2

    # rolling head-window values of length n-1, in both digit encodings:
    # the input base for matching lookups, the extended base for petal words
    if n == 1:
        head_b = [0] * L
        head_hat = [0] * L
    else:
        modb = b ** (n - 1)
        vb = vh = 0
        for j in range(L - (n - 1), L):
            vb = (vb * b + data[j]) % modb
            vh = (vh * bh + data[j]) % top
        head_b = []
        head_hat = []
        for i in range(L):
            vb = (vb * b + data[i]) % modb
            vh = (vh * bh + data[i]) % top
            head_b.append(vb)
            head_hat.append(vh)

    spans: list[tuple[int, int]] = []
    for i in range(L):
        out.append(data[i])
        m = i % k
        j = i // b
        if not section_done[j] and matching.get(j) == (head_b[i], m):
            section_done[j] = True
            w0 = head_hat[i] * bh + sig
            ck = idx.key(w0, m)
            if ck not in inserted:
                if parent.get(ck, 0) is not None:
                    raise PetalCoverageError("level-1 petal has a non-root parent")
                inserted.add(ck)
                start = len(out)
                walk_petal(w0, m, ck)
                spans.append((start, len(out)))

    expected = k * bh**n
    if len(out) != expected or len(inserted) != tree.size:
        raise PetalCoverageError(
            f"petal coverage failure: emitted {len(out)} of {expected} symbols, "
            f"traversed {len(inserted)} of {tree.size} petal classes"
        )
    return out, len(inserted), spans


def theorem1_gap_bound(alphabet_size: int, hat_size: int, position: int) -> int:
    """Ceiling of 2|A| + log_{|A|+1}(N), the stream-level gap bound."""
    return math.ceil(2 * alphabet_size + math.log(position) / math.log(hat_size))


def liberal_insert_stream(
    alphabet: Alphabet,
    sigma: str,
    n_max: Optional[int] = None,
    k_fn=None,
) -> Iterator[str]:
    """Apply the insertion blockwise to the perfect-necklace stream.

    Block n is the Eulerian (n, k_n)-perfect necklace (k_n = n by default),
    embedded into the extended alphabet; the concatenation of the embedded
    blocks is emitted symbol by symbol.
    """
    if sigma in alphabet:
        raise NormweaveError(f"sigma {sigma!r} must not belong to the alphabet")
    if k_fn is None:
        k_fn = lambda n: n
    n = 1
    while n_max is None or n <= n_max:
        necklace, cycle = eulerian_perfect_necklace(alphabet, n, k_fn(n))
        result = liberal_insert(
            necklace.word, sigma, n=n, k=k_fn(n), cycle=cycle, trusted=True
        )
        yield from result.word.text
        n += 1
