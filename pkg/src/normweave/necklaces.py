"""Generators, counters and enumeration oracles for perfect necklaces.

A (n,k)-perfect necklace over alphabet A is a circular word of length
k*|A|^n in which every length-n word occurs exactly k times, at starting
positions with pairwise distinct residues mod k.  The generators here are
the lexicographic concatenation, the arithmetic-progression concatenation,
Eulerian cycles on astute graphs, and a backtracking search for the nested
variant.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Optional

from .analysis import is_nested, is_perfect
from .errors import GuardExceeded, NormweaveError, SearchBudgetExceeded
from .words import Alphabet, Word, canonical_text

MAX_STREAM_BLOCK = 50_000_000
ENUMERATION_EDGE_GUARD = 24


@dataclass(frozen=True)
class Necklace:
    """A word together with its certified (n,k)-perfectness metadata."""

    word: Word
    order_n: int
    multiplicity_k: int

    def canonical(self) -> str:
        return canonical_text(self.word.text)

    def __len__(self) -> int:
        return len(self.word)


@dataclass(frozen=True)
class AstuteGraph:
    """The de Bruijn-like graph on (length-n word, residue mod k) pairs.

    Vertices are all pairs (w, m); there is an edge (w, m) -> (w', m+1 mod k)
    whenever w and w' overlap in n-1 symbols.  Edges are identified by their
    (n+1)-symbol label together with the tail residue.
    """

    alphabet: Alphabet
    word_len_n: int
    modulus_k: int

    @property
    def vertex_count(self) -> int:
        return self.modulus_k * self.alphabet.size**self.word_len_n

    @property
    def edge_count(self) -> int:
        return self.modulus_k * self.alphabet.size ** (self.word_len_n + 1)

    def vertices(self) -> Iterator[tuple[int, int]]:
        for w in range(self.alphabet.size**self.word_len_n):
            for m in range(self.modulus_k):
                yield (w, m)

    def edge_target(self, w: int, m: int, c: int) -> tuple[int, int]:
        """Head of the out-edge of (w, m) labelled word(w)+symbol(c)."""
        b = self.alphabet.size
        n = self.word_len_n
        if n == 0:
            return (0, (m + 1) % self.modulus_k)
        w2 = (w % b ** (n - 1)) * b + c
        return (w2, (m + 1) % self.modulus_k)

    def out_degree(self, _vertex=None) -> int:
        return self.alphabet.size

    def in_degree(self, _vertex=None) -> int:
        return self.alphabet.size

    def is_strongly_connected(self) -> bool:
        from collections import deque

        start = (0, 0)
        for reverse in (False, True):
            seen = {start}
            queue = deque([start])
            while queue:
                w, m = queue.popleft()
                for c in range(self.alphabet.size):
                    if not reverse:
                        nxt = self.edge_target(w, m, c)
                    else:
                        # predecessors: (a*b^(n-1) + w>>1, m-1)
                        b = self.alphabet.size
                        n = self.word_len_n
                        prev_w = c * b ** (n - 1) + w // b if n else 0
                        nxt = (prev_w, (m - 1) % self.modulus_k)
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
            if len(seen) != self.vertex_count:
                return False
        return True


@dataclass(frozen=True)
class PointedEulerianCycle:
    """An Eulerian cycle of an astute graph, stored as the word it spells.

    Edge i (0-based) appends word[i]; its label is the (n+1)-symbol window
    ending at position i and its head carries residue i mod k.
    """

    graph: AstuteGraph
    word: Word

    @property
    def edge_count(self) -> int:
        return len(self.word)

    @property
    def label_len(self) -> int:
        return self.graph.word_len_n + 1

    def heads(self) -> Iterator[tuple[tuple[int, ...], int]]:
        """(head word as index tuple, residue) for each edge in cycle order."""
        n = self.graph.word_len_n
        k = self.graph.modulus_k
        data = self.word.data
        L = len(data)
        for i in range(L):
            if n == 0:
                yield ((), i % k)
            else:
                head = tuple(data[(i - n + 1 + j) % L] for j in range(n))
                yield (head, i % k)

    def spelled(self) -> Word:
        return self.word


def cycle_from_word(word: Word, n: int, k: int) -> PointedEulerianCycle:
    """Reconstruct the pointed Eulerian cycle a perfect word spells.

    The cycle is pointed at position 1 of the word with the convention that
    the head of edge i has residue i mod k.
    """
    report = is_perfect(word, n, k)
    if not report.ok:
        raise NormweaveError(
            f"word is not ({n},{k})-perfect: {report.violation_word!r} repeats "
            f"at residues {report.violation_residues}"
        )
    graph = AstuteGraph(word.alphabet, n - 1, k)
    return PointedEulerianCycle(graph=graph, word=word)


def ordered_necklace(alphabet: Alphabet, n: int) -> Necklace:
    """Concatenation of all length-n words in lexicographic order."""
    if n < 1:
        raise NormweaveError("order must be at least 1")
    b = alphabet.size
    if n * b**n > MAX_STREAM_BLOCK:
        raise GuardExceeded(f"ordered necklace of order {n} exceeds the length guard")
    data = []
    for value in range(b**n):
        digits = _digits(value, b, n)
        data.extend(digits)
    return Necklace(Word(alphabet, data), order_n=n, multiplicity_k=n)


def arithmetic_necklace(alphabet: Alphabet, n: int, r: int) -> Necklace:
    """Concatenation of the base-b encodings of 0, r, 2r, ..., (b^n - 1)r."""
    b = alphabet.size
    if math.gcd(r, b) != 1:
        raise NormweaveError("r must be coprime with alphabet size")
    if n < 1:
        raise NormweaveError("order must be at least 1")
    mod = b**n
    data = []
    for i in range(mod):
        data.extend(_digits((i * r) % mod, b, n))
    return Necklace(Word(alphabet, data), order_n=n, multiplicity_k=n)


def _digits(value: int, b: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        value, d = divmod(value, b)
        out.append(d)
    out.reverse()
    return out


def build_astute_graph(alphabet: Alphabet, n: int, k: int) -> AstuteGraph:
    if n < 0 or k < 1:
        raise NormweaveError("astute graph needs n >= 0 and k >= 1")
    return AstuteGraph(alphabet, n, k)


def eulerian_perfect_necklace(
    alphabet: Alphabet, n: int, k: int
) -> tuple[Necklace, PointedEulerianCycle]:
    """Hierholzer's algorithm on G(n-1, k) with deterministic tie-breaking:
    unused out-edges are taken by ascending appended symbol, so edge labels
    are visited in lexicographic order at each vertex."""
    if n < 1 or k < 1:
        raise NormweaveError("need n >= 1 and k >= 1")
    b = alphabet.size
    if k * b**n > MAX_STREAM_BLOCK:
        raise GuardExceeded(f"necklace ({n},{k}) exceeds the length guard")
    graph = AstuteGraph(alphabet, n - 1, k)
    nm1 = n - 1
    wcount = b**nm1
    # vertex id = wval * k + residue; start so the first edge's head is residue 0
    start = 0 * k + (k - 1)
    cursors = bytearray(wcount * k)
    tail = wcount // b if nm1 >= 1 else 1
    stack = [(start, -1)]
    out_rev = []
    while stack:
        v, sym_in = stack[-1]
        c = cursors[v]
        if c < b:
            cursors[v] = c + 1
            wval, m = divmod(v, k)
            if nm1 == 0:
                w2 = 0
            else:
                w2 = (wval % tail) * b + c
            stack.append((w2 * k + (m + 1) % k, c))
        else:
            stack.pop()
            if sym_in >= 0:
                out_rev.append(sym_in)
    if len(out_rev) != graph.edge_count:
        raise NormweaveError("Eulerian traversal failed to cover the graph")
    out_rev.reverse()
    word = Word(alphabet, out_rev)
    necklace = Necklace(word, order_n=n, multiplicity_k=k)
    return necklace, PointedEulerianCycle(graph=graph, word=word)


def count_perfect(b: int, n: int, k: int) -> int:
    """Exact count of (n,k)-perfect necklace classes over a b-symbol alphabet.

    Evaluates (1/k) * sum over d(b,k) | j | k of e(j) * phi(k/j), where
    e(j) = (b!)^(j*b^(n-1)) / b^n counts the Eulerian cycles of the
    corresponding astute graph; every division must be exact.
    """
    if b < 2 or n < 1 or k < 1:
        raise NormweaveError("need b >= 2, n >= 1, k >= 1")
    d = 1
    kk = k
    for p in _prime_factors(math.gcd(b, k)):
        alpha = 0
        while kk % p == 0:
            kk //= p
            alpha += 1
        d *= p**alpha
        kk = k
    total = 0
    fact = math.factorial(b)
    for j in range(1, k + 1):
        if k % j or j % d:
            continue
        e_num = fact ** (j * b ** (n - 1))
        if e_num % b**n:
            raise NormweaveError("counting formula inconsistency")
        total += (e_num // b**n) * _totient(k // j)
    if total % k:
        raise NormweaveError("counting formula inconsistency")
    return total // k


def _prime_factors(x: int) -> list[int]:
    out = []
    p = 2
    while p * p <= x:
        if x % p == 0:
            out.append(p)
            while x % p == 0:
                x //= p
        p += 1
    if x > 1:
        out.append(x)
    return out


def _totient(m: int) -> int:
    result = m
    for p in _prime_factors(m):
        result -= result // p
    return result


def enumerate_perfect(alphabet: Alphabet, n: int, k: int) -> set[str]:
    """Brute-force oracle: all distinct canonical (n,k)-perfect necklaces,
    found by enumerating every Eulerian cycle of the astute graph."""
    b = alphabet.size
    edges = k * b**n
    if edges > ENUMERATION_EDGE_GUARD:
        raise GuardExceeded(
            f"instance has {edges} edges, above the exhaustive guard "
            f"{ENUMERATION_EDGE_GUARD}"
        )
    nm1 = n - 1
    wcount = b**nm1
    tail = wcount // b if nm1 >= 1 else 1
    k_ = k
    taken = [[False] * b for _ in range(wcount * k_)]
    start = 0
    found: set[str] = set()
    path: list[int] = []

    def dfs(v: int, used: int) -> None:
        if used == edges:
            if v == start:
                text = "".join(alphabet.symbols[c] for c in path)
                found.add(canonical_text(text))
            return
        wval, m = divmod(v, k_)
        for c in range(b):
            if taken[v][c]:
                continue
            taken[v][c] = True
            w2 = (wval % tail) * b + c if nm1 else 0
            nxt = w2 * k_ + (m + 1) % k_
            path.append(c)
            dfs(nxt, used + 1)
            path.pop()
            taken[v][c] = False

    dfs(start, 0)
    return found


def enumerate_nested_words(
    alphabet: Alphabet, n: int, k: int, guard: int = 70_000
) -> tuple[int, set[str]]:
    """Brute-force nested oracle: (pointed word count, canonical classes).

    Exhaustively tests every word of length k*b^n, so it is only usable for
    tiny instances; the published count of nested necklaces refers to
    pointed words, which is why both numbers are returned.
    """
    b = alphabet.size
    length = k * b**n
    if b**length > guard:
        raise GuardExceeded(f"b^length = {b}^{length} exceeds guard {guard}")
    pointed = 0
    classes: set[str] = set()
    for combo in itertools.product(range(b), repeat=length):
        w = Word(alphabet, combo)
        if is_nested(w, n, k):
            pointed += 1
            classes.add(canonical_text(w.text))
    return pointed, classes


def nested_perfect(
    alphabet: Alphabet,
    n: int,
    k: int,
    budget: int = 30_000_000,
) -> Necklace:
    """First nested (n,k)-perfect necklace in lexicographic order.

    Depth-first search over symbol choices.  A prefix survives only if, at
    every nesting level, no (window, residue) pair is used twice inside its
    part; parts are closed circularly the moment they complete.  This is
    exactly the nestedness invariant, so the checker accepts any output.
    """
    outcome, word = _nested_search(alphabet.symbols, alphabet.size, n, k, budget)
    if outcome == "budget":
        raise SearchBudgetExceeded(
            f"nested search for ({n},{k}) over {''.join(alphabet.symbols)!r} "
            f"exhausted its budget of {budget} placements"
        )
    if outcome == "unsat":
        raise NormweaveError(
            f"no nested ({n},{k})-perfect necklace exists over "
            f"{''.join(alphabet.symbols)!r} (search space exhausted)"
        )
    return Necklace(alphabet.word(word), order_n=n, multiplicity_k=k)


@lru_cache(maxsize=64)
def _nested_search(
    symbols: tuple, b: int, n: int, k: int, budget: int
) -> tuple[str, Optional[str]]:
    length = k * b**n
    # per level j: parts of order o = n - j and length k*b^o; one flat
    # occupancy table per level, indexed by ((part * b^o) + window) * k + res
    orders = list(range(n, 0, -1))
    plens = [k * b**o for o in orders]
    tables = [bytearray(length) for _ in orders]
    powers = [b**o for o in orders]
    word = [0] * length
    undo: list[list[int]] = [[] for _ in range(length)]

    def window_val(level: int, end: int) -> int:
        o = orders[level]
        val = 0
        for pos in range(end - o + 1, end + 1):
            val = val * b + word[pos]
        return val

    def place(i: int, c: int) -> bool:
        word[i] = c
        log = undo[i]
        for level, (o, pl, bo) in enumerate(zip(orders, plens, powers)):
            part, ipart = divmod(i, pl)
            table = tables[level]
            if ipart >= o - 1:
                val = window_val(level, i)
                res = (ipart - o + 1) % k
                idx = (part * bo + val) * k + res
                if table[idx]:
                    _rollback(log)
                    return False
                table[idx] = 1
                log.append(level * length * 8 + idx)  # packed (level, idx)
            if ipart == pl - 1 and o > 1:
                base = part * pl
                for s in range(pl - o + 1, pl):  # wrap windows, 0-based starts
                    val = 0
                    for j in range(o):
                        val = val * b + word[base + (s + j) % pl]
                    res = s % k
                    idx = (part * bo + val) * k + res
                    if table[idx]:
                        _rollback(log)
                        return False
                    table[idx] = 1
                    log.append(level * length * 8 + idx)
        return True

    def _rollback(log: list[int]) -> None:
        pack = length * 8
        while log:
            entry = log.pop()
            tables[entry // pack][entry % pack] = 0

    nodes = 0
    i = 0
    choice = [0] * (length + 1)
    while 0 <= i < length:
        c = choice[i]
        if c >= b:
            choice[i] = 0
            i -= 1
            if i >= 0:
                _rollback(undo[i])
                choice[i] += 1
            continue
        nodes += 1
        if nodes > budget:
            return ("budget", None)
        if place(i, c):
            i += 1
        else:
            choice[i] += 1
    if i < 0:
        return ("unsat", None)
    return ("found", "".join(symbols[c] for c in word))


def perfect_stream(
    alphabet: Alphabet,
    n_max: Optional[int] = None,
    k_fn: Optional[Callable[[int], int]] = None,
) -> Iterator[str]:
    """Concatenation of (n, k_n)-perfect necklaces for n = 1, 2, ...

    ``k_fn`` must be linear with slope >= 1 for the stream to be normal;
    the default is k_n = n.
    """
    if k_fn is None:
        k_fn = lambda n: n
    n = 1
    while n_max is None or n <= n_max:
        k = k_fn(n)
        if k < 1:
            raise NormweaveError(f"k_fn({n}) = {k} must be positive")
        necklace, _ = eulerian_perfect_necklace(alphabet, n, k)
        yield from necklace.word.text
        n += 1


def nested_stream(
    alphabet: Alphabet,
    d_max: int,
    start_d: int = 0,
    budget: int = 30_000_000,
) -> Iterator[str]:
    """Concatenation of nested (2^d, 2^d)-perfect necklaces for
    d = start_d .. d_max."""
    for d in range(start_d, d_max + 1):
        block = nested_perfect(alphabet, 2**d, 2**d, budget=budget)
        yield from block.word.text
