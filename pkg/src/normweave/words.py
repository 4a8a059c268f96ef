"""Ordered alphabets, finite words, rotations and exact occurrence counters.

Words carry their alphabet and store symbol *indices*; extending an alphabet
with one extra symbol therefore embeds every existing word unchanged.
Positions in all public counting APIs are 1-based.
"""
from __future__ import annotations

import string
from typing import Iterable, Iterator, Sequence, TextIO

from .errors import NormweaveError

_PRINTABLE = set(string.printable) - set(string.whitespace)

MAX_ALPHABET = 36


class Alphabet:
    """An ordered set of distinct printable single-character symbols."""

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols: Iterable[str]):
        syms = tuple(symbols)
        if not 2 <= len(syms) <= MAX_ALPHABET:
            raise NormweaveError(
                f"alphabet size must be between 2 and {MAX_ALPHABET}, got {len(syms)}"
            )
        for s in syms:
            if len(s) != 1 or s not in _PRINTABLE:
                raise NormweaveError(f"alphabet symbol {s!r} is not a printable character")
        if len(set(syms)) != len(syms):
            raise NormweaveError("alphabet symbols must be pairwise distinct")
        self.symbols = syms
        self._index = {s: i for i, s in enumerate(syms)}

    @property
    def size(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self) -> int:
        return hash(self.symbols)

    def __repr__(self) -> str:
        return f"Alphabet({''.join(self.symbols)!r})"

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise NormweaveError(f"symbol {symbol!r} is not in alphabet {self!r}") from None

    def symbol(self, i: int) -> str:
        return self.symbols[i]

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._index

    def extend(self, extra: str) -> "Alphabet":
        """Return the alphabet with ``extra`` appended as the last-indexed symbol."""
        if extra in self._index:
            raise NormweaveError(f"symbol {extra!r} is already in the alphabet")
        return Alphabet(self.symbols + (extra,))

    def word(self, text: str) -> "Word":
        """Parse a character string into a Word, reporting the first bad symbol."""
        data = []
        for pos, ch in enumerate(text, start=1):
            idx = self._index.get(ch)
            if idx is None:
                raise NormweaveError(
                    f"symbol {ch!r} at position {pos} is not in alphabet "
                    f"{''.join(self.symbols)!r}"
                )
            data.append(idx)
        return Word(self, tuple(data))

    def from_indices(self, data: Iterable[int]) -> "Word":
        return Word(self, tuple(data))

    def all_words(self, length: int) -> Iterator[str]:
        """All words of a given length as text, in lexicographic order."""
        if length == 0:
            yield ""
            return
        b = self.size
        for value in range(b**length):
            yield self.render_value(value, length)

    def render_value(self, value: int, length: int) -> str:
        """Base-b digits of ``value`` as symbols, most significant first."""
        b = self.size
        out = []
        for _ in range(length):
            value, d = divmod(value, b)
            out.append(self.symbols[d])
        return "".join(reversed(out))


class Word:
    """A finite sequence of symbol indices over a fixed alphabet."""

    __slots__ = ("alphabet", "data", "_text")

    def __init__(self, alphabet: Alphabet, data: Sequence[int]):
        b = alphabet.size
        data = tuple(data)
        for idx in data:
            if not 0 <= idx < b:
                raise NormweaveError(f"symbol index {idx} out of range for {alphabet!r}")
        self.alphabet = alphabet
        self.data = data
        self._text = None

    @property
    def text(self) -> str:
        if self._text is None:
            syms = self.alphabet.symbols
            self._text = "".join(syms[i] for i in self.data)
        return self._text

    def __len__(self) -> int:
        return len(self.data)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Word)
            and self.alphabet == other.alphabet
            and self.data == other.data
        )

    def __hash__(self) -> int:
        return hash((self.alphabet, self.data))

    def __repr__(self) -> str:
        return f"Word({self.text!r})"

    def __add__(self, other: "Word") -> "Word":
        if self.alphabet != other.alphabet:
            raise NormweaveError("cannot concatenate words over different alphabets")
        return Word(self.alphabet, self.data + other.data)

    def symbol_at(self, i: int) -> str:
        """Symbol at 1-based position i."""
        if not 1 <= i <= len(self.data):
            raise NormweaveError(f"position {i} out of range 1..{len(self.data)}")
        return self.alphabet.symbols[self.data[i - 1]]

    def segment(self, i: int, j: int) -> "Word":
        """The factor from 1-based position i to j inclusive (empty when j < i)."""
        if i < 1 or j > len(self.data):
            raise NormweaveError(f"segment [{i},{j}] out of range 1..{len(self.data)}")
        return Word(self.alphabet, self.data[i - 1 : j])

    def embed(self, wider: Alphabet) -> "Word":
        """Reinterpret over a wider alphabet; indices are preserved."""
        if wider.symbols[: self.alphabet.size] != self.alphabet.symbols:
            raise NormweaveError("wider alphabet must extend the word's alphabet")
        return Word(wider, self.data)


def rotate(w: Word, t: int) -> Word:
    """Left rotation by t positions (t may exceed the length; reduced mod |w|)."""
    n = len(w)
    if n == 0:
        raise NormweaveError("empty word has no rotation")
    t %= n
    return Word(w.alphabet, w.data[t:] + w.data[:t])


def occurrences(v: Word | str, u: Word | str) -> int:
    """Number of (possibly overlapping) occurrences of u in v."""
    vt = v.text if isinstance(v, Word) else v
    ut = u.text if isinstance(u, Word) else u
    if not ut:
        raise NormweaveError("pattern must be non-empty")
    count = 0
    i = vt.find(ut)
    while i != -1:
        count += 1
        i = vt.find(ut, i + 1)
    return count


def aligned_occurrences(v: Word | str, u: Word | str) -> int:
    """Occurrences of u in v at 1-based positions congruent to 1 mod |u|."""
    vt = v.text if isinstance(v, Word) else v
    ut = u.text if isinstance(u, Word) else u
    m = len(ut)
    if m == 0:
        raise NormweaveError("pattern must be non-empty")
    count = 0
    for i in range(0, len(vt) - m + 1, m):
        if vt[i : i + m] == ut:
            count += 1
    return count


def canonical_necklace(w: Word) -> Word:
    """Lexicographically least rotation; the canonical necklace representative."""
    if len(w) == 0:
        raise NormweaveError("empty word has no canonical rotation")
    return w.alphabet.word(canonical_text(w.text))


def canonical_text(text: str) -> str:
    """Least rotation of a plain string (symbol order = character order)."""
    if not text:
        raise NormweaveError("empty word has no canonical rotation")
    doubled = text + text
    n = len(text)
    return min(doubled[i : i + n] for i in range(n))


def read_symbols(stream: TextIO) -> str:
    """Read a symbol stream, ignoring all whitespace (including newlines)."""
    return "".join(stream.read().split())


def write_symbols(stream: TextIO, symbols: Iterable[str], width: int = 120) -> int:
    """Write symbols wrapped at ``width`` per line; returns the symbol count."""
    count = 0
    col = 0
    for ch in symbols:
        stream.write(ch)
        count += 1
        col += 1
        if col == width:
            stream.write("\n")
            col = 0
    if col:
        stream.write("\n")
    return count
