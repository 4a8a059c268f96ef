"""Exact checkers and statistics for necklaces and symbol streams.

Everything here is pure and deterministic.  Bound comparisons that matter
(perfectness, discrete discrepancy, crucial bounds) are done in exact
integer/rational arithmetic; floats appear only in reports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import GuardExceeded, NormweaveError
from .words import Alphabet, Word, aligned_occurrences, occurrences

MAX_DELTA_WORDS = 4096


@dataclass
class PerfectnessReport:
    """Outcome of the (n,k)-perfectness scan of a circular word."""

    ok: bool
    n: int
    k: int
    length: int
    violation_word: Optional[str] = None
    violation_residues: Optional[tuple[int, ...]] = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class DiscrepancyReport:
    """Worst aligned-block frequency deviation for one window length."""

    ell: int
    windows: int
    delta: Fraction
    argmax_word: str

    @property
    def delta_float(self) -> float:
        return float(self.delta)


@dataclass
class GapReport:
    """Positions of a marker symbol and the spacing between them."""

    sigma: str
    length: int
    positions: list[int]
    max_gap: int
    mode: str
    bound: Optional[int] = None

    @property
    def ok(self) -> Optional[bool]:
        if self.bound is None:
            return None
        return self.max_gap <= self.bound


@dataclass
class CrucialReport:
    """Aligned-occurrence bounds instantiated on one perfect necklace.

    Window lengths dividing k are asserted (the bounds are theorems there);
    other window lengths are measured and reported in ``advisory_slack``
    only, since explicit perfect necklaces exceed the stated bounds for
    them (e.g. "001100110011" is (2,3)-perfect with 3 aligned "00").
    """

    ok: bool
    worst_slack: dict
    advisory_slack: dict
    violations: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _codes(word: Word) -> list[int]:
    return list(word.data)


def is_perfect(w: Word, n: int, k: int) -> PerfectnessReport:
    """Check that every length-n word occurs exactly k times circularly,
    at starting positions with pairwise distinct residues mod k.

    The verdict is rotation invariant; the scan fixes the convention that a
    window starting at 1-based position p carries residue (p-1) mod k.
    """
    b = w.alphabet.size
    expected = k * b**n
    if len(w) != expected:
        raise NormweaveError(
            f"word length {len(w)} does not match k*b^n = {k}*{b}^{n} = {expected}"
        )
    data = w.data
    seen = set()
    # rolling window value over the doubled word
    mod = b**n
    val = 0
    for i in range(n - 1):
        val = val * b + data[i]
    for p in range(expected):  # 0-based start position
        val = (val * b + data[(p + n - 1) % expected]) % mod
        key = val * k + p % k
        if key in seen:
            residues = tuple(
                q % k
                for q in range(expected)
                if _window_value(data, q, n, b) == val
            )
            return PerfectnessReport(
                ok=False,
                n=n,
                k=k,
                length=expected,
                violation_word=w.alphabet.render_value(val, n),
                violation_residues=residues,
            )
        seen.add(key)
    return PerfectnessReport(ok=True, n=n, k=k, length=expected)


def _window_value(data: Sequence[int], start: int, n: int, b: int) -> int:
    L = len(data)
    val = 0
    for j in range(n):
        val = val * b + data[(start + j) % L]
    return val


def is_nested(w: Word, n: int, k: int) -> bool:
    """(n,k)-perfect and, recursively, a concatenation of |A| nested
    (n-1,k)-perfect necklaces (base case n = 1)."""
    b = w.alphabet.size
    if len(w) != k * b**n:
        raise NormweaveError(
            f"word length {len(w)} does not match k*b^n = {k}*{b}^{n}"
        )
    if not is_perfect(w, n, k).ok:
        return False
    if n == 1:
        return True
    part = len(w) // b
    return all(
        is_nested(w.segment(i * part + 1, (i + 1) * part), n - 1, k) for i in range(b)
    )


def aligned_counts(text: str, alphabet: Alphabet, ell: int) -> dict[str, int]:
    """Counts of every length-ell word at aligned positions of ``text``."""
    windows = len(text) // ell
    if windows == 0:
        return {}
    if len(text) > 10_000:
        codes = np.frombuffer(text[: windows * ell].encode("ascii"), dtype=np.uint8)
        lut = np.zeros(128, dtype=np.int64)
        for i, s in enumerate(alphabet.symbols):
            lut[ord(s)] = i
        vals = lut[codes].reshape(windows, ell)
        packed = np.zeros(windows, dtype=np.int64)
        for j in range(ell):
            packed = packed * alphabet.size + vals[:, j]
        uniq, cnt = np.unique(packed, return_counts=True)
        return {
            alphabet.render_value(int(v), ell): int(c) for v, c in zip(uniq, cnt)
        }
    counts: dict[str, int] = {}
    for i in range(0, windows * ell, ell):
        u = text[i : i + ell]
        counts[u] = counts.get(u, 0) + 1
    return counts


def discrete_discrepancy(v: Word, ell: int) -> DiscrepancyReport:
    """Max over all u in A^ell of |aligned_count/floor(|v|/ell) - |A|^-ell|,
    as an exact rational."""
    b = v.alphabet.size
    if ell < 1 or len(v) < ell:
        raise NormweaveError(f"window length {ell} out of range for |v| = {len(v)}")
    if b**ell > MAX_DELTA_WORDS:
        raise GuardExceeded(
            f"b^ell = {b}^{ell} exceeds the exhaustive guard {MAX_DELTA_WORDS}"
        )
    windows = len(v) // ell
    counts = aligned_counts(v.text, v.alphabet, ell)
    uniform = Fraction(1, b**ell)
    best = Fraction(-1)
    best_word = ""
    # words absent from v still contribute |0 - uniform|
    if len(counts) < b**ell:
        best = uniform
        for value in range(b**ell):
            u = v.alphabet.render_value(value, ell)
            if u not in counts:
                best_word = u
                break
    for u, c in sorted(counts.items()):
        d = abs(Fraction(c, windows) - uniform)
        if d > best:
            best, best_word = d, u
    return DiscrepancyReport(ell=ell, windows=windows, delta=best, argmax_word=best_word)


def check_crucial(
    v: Word,
    n: int,
    k: int,
    nested_split: Optional[tuple[Word, Word]] = None,
) -> CrucialReport:
    """Instantiate the aligned-occurrence bounds that every (n,k)-perfect
    necklace satisfies.

    Point 1 bounds the aligned count of every u with |u| <= n; Point 2 does
    the same on every shifted suffix; Point 3 (only when a nested split
    v = s t is supplied) bounds the straddling windows of the two halves.
    """
    b = v.alphabet.size
    report = is_perfect(v, n, k)
    if not report.ok:
        raise NormweaveError("check_crucial requires an (n,k)-perfect input")
    text = v.text
    violations = []
    worst = {"point1": None, "point2": None, "point3": None}
    advisory = {"point1": None, "point2": None, "point3": None}

    def track(point: str, asserted: bool, slack: int, witness) -> None:
        book = worst if asserted else advisory
        if book[point] is None or slack < book[point]:
            book[point] = slack
        if asserted and slack < 0:
            violations.append((point, witness))

    for m in range(1, n + 1):
        asserted = k % m == 0
        ratio = Fraction(k, m) * b ** (n - m)
        lo1, hi1 = math.floor(ratio) - 1, math.ceil(ratio)
        lo2 = math.floor(ratio) - 2
        counts = aligned_counts(text, v.alphabet, m)
        for value in range(b**m):
            u = v.alphabet.render_value(value, m)
            c = counts.get(u, 0)
            track("point1", asserted, min(c - lo1, hi1 - c), (u, c))
        for i in range(m):
            shifted = aligned_counts(text[i:], v.alphabet, m)
            for value in range(b**m):
                u = v.alphabet.render_value(value, m)
                c = shifted.get(u, 0)
                track("point2", asserted, min(c - lo2, hi1 - c), (u, i, c))

    if nested_split is not None:
        s, t = nested_split
        st, tt = s.text, t.text
        if st + tt != text:
            raise NormweaveError("nested split must concatenate back to the word")
        for m in range(1, n):
            asserted = k % m == 0
            ratio = Fraction(k, m) * b ** (n - 1 - m)
            lo = math.floor(ratio) - 2
            hi = math.ceil(ratio) + 1
            for i in range(m):
                straddle_a = st[len(st) - i :] + tt[: len(tt) - i]
                straddle_b = st[i:] + tt[:i]
                for w_text in (straddle_a, straddle_b):
                    counts = aligned_counts(w_text, v.alphabet, m)
                    for value in range(b**m):
                        u = v.alphabet.render_value(value, m)
                        c = counts.get(u, 0)
                        track("point3", asserted, min(c - lo, hi - c), (u, i, c))

    return CrucialReport(
        ok=not violations,
        worst_slack=worst,
        advisory_slack=advisory,
        violations=violations,
    )


def sigma_gaps(
    text: str,
    sigma: str,
    mode: str = "circular",
    bound: Optional[int] = None,
) -> GapReport:
    """Positions of sigma and the largest run of other symbols between
    consecutive occurrences (wrapping around in circular mode)."""
    if mode not in ("circular", "linear"):
        raise NormweaveError(f"unknown gap mode {mode!r}")
    positions = [i + 1 for i, ch in enumerate(text) if ch == sigma]
    if not positions or (len(positions) == 1 and mode == "linear"):
        return GapReport(
            sigma=sigma,
            length=len(text),
            positions=positions,
            max_gap=-1,
            mode="insufficient",
            bound=bound,
        )
    gaps = [b - a - 1 for a, b in zip(positions, positions[1:])]
    if mode == "circular":
        # with a single occurrence the wrap-around gap spans the whole word
        gaps.append(len(text) - positions[-1] + positions[0] - 1)
    return GapReport(
        sigma=sigma,
        length=len(text),
        positions=positions,
        max_gap=max(gaps),
        mode=mode,
        bound=bound,
    )


def gap_around(positions: Sequence[int], N: int) -> Optional[int]:
    """Symbols strictly between the sigma just before-or-at N and the next
    one after N; None when N is outside the covered range."""
    import bisect

    i = bisect.bisect_right(positions, N)
    if i == 0 or i == len(positions):
        return None
    return positions[i] - positions[i - 1] - 1


def occurrence_table(text: str, alphabet: Alphabet, max_len: int) -> dict[str, int]:
    """Sliding (unaligned) occurrence counts of all words up to max_len."""
    table: dict[str, int] = {}
    L = len(text)
    for m in range(1, max_len + 1):
        if L < m:
            continue
        if L > 10_000:
            codes = np.frombuffer(text.encode("ascii"), dtype=np.uint8)
            lut = np.zeros(128, dtype=np.int64)
            for i, s in enumerate(alphabet.symbols):
                lut[ord(s)] = i
            vals = lut[codes]
            packed = np.zeros(L - m + 1, dtype=np.int64)
            for j in range(m):
                packed = packed * alphabet.size + vals[j : L - m + 1 + j]
            uniq, cnt = np.unique(packed, return_counts=True)
            for value, c in zip(uniq, cnt):
                table[alphabet.render_value(int(value), m)] = int(c)
        else:
            for i in range(L - m + 1):
                u = text[i : i + m]
                table[u] = table.get(u, 0) + 1
    return table


def ps_statistic(
    text: str, alphabet: Alphabet, max_len: int
) -> tuple[float, dict[int, float]]:
    """Empirical uniformity constant: max over u with |u| <= max_len of
    occ(text, u) * |A|^{|u|} / |text|, plus the per-length maxima."""
    if not text:
        raise NormweaveError("empty prefix")
    b = alphabet.size
    table = occurrence_table(text, alphabet, max_len)
    per_len: dict[int, float] = {}
    for u, c in table.items():
        m = len(u)
        stat = c * b**m / len(text)
        if stat > per_len.get(m, 0.0):
            per_len[m] = stat
    return max(per_len.values()), per_len


def star_discrepancy(text: str, alphabet: Alphabet, N: int) -> float:
    """Star discrepancy of the N orbit points read off the digit stream.

    Point i (i = 0..N-1) is the value of the ~53 significant bits of digits
    starting at position i+1, so truncation error is below 2^-53 and is
    absorbed by the comparisons this is used in.
    """
    b = alphabet.size
    digits_per_point = math.ceil(53 / math.log2(b))
    if len(text) < N + 64:
        raise NormweaveError(
            f"need at least N + 64 = {N + 64} digits, have {len(text)}"
        )
    codes = [alphabet.index(ch) for ch in text[: N + digits_per_point]]
    scale = b**digits_per_point
    points = []
    val = 0
    for j in range(digits_per_point):
        val = val * b + codes[j]
    for i in range(N):
        points.append(val / scale)
        if i + 1 < N:
            val = (val * b - codes[i] * scale) + codes[i + digits_per_point]
    points.sort()
    d = 0.0
    for i, x in enumerate(points, start=1):
        d = max(d, i / N - x, x - (i - 1) / N)
    return d


def is_subsequence(
    v: str | Word,
    w: str | Word,
    sigma: Optional[str] = None,
) -> tuple[bool, str]:
    """Greedy left-to-right embedding test of v into w.

    Returns (embeds, skipped) where skipped is the concatenation of the
    symbols of w not used by the greedy embedding.  When ``sigma`` is given,
    the caller can additionally require skipped to consist of sigma only.
    """
    vt = v.text if isinstance(v, Word) else v
    wt = w.text if isinstance(w, Word) else w
    skipped = []
    i = 0
    for ch in wt:
        if i < len(vt) and ch == vt[i]:
            i += 1
        else:
            skipped.append(ch)
    ok = i == len(vt)
    return ok, "".join(skipped)


@dataclass
class ConversionReport:
    """Measured sides of the two discrepancy-conversion inequalities."""

    aligned_ok: Optional[bool]
    aligned_detail: Optional[dict]
    unaligned_ok: Optional[bool]
    unaligned_detail: Optional[dict]

    @property
    def ok(self) -> bool:
        return (self.aligned_ok is not False) and (self.unaligned_ok is not False)


def check_discrepancy_conversion(v: Word, m: int, n: int) -> ConversionReport:
    """Verify, with measured exact discrepancies, that

    - the aligned discrepancy at window n is at most |A|^{(m-1)n} times the
      aligned discrepancy at window m*n (when |v| is a multiple of m*n), and
    - every pattern of length m occurs at unaligned positions at most
      |v|*((m-1)/n + |A|^-m + |A|^n * delta_n) - (m-1) times (when m < n
      and |v| is a multiple of n).

    Both are theorems for any word; a violation indicates a counting bug.
    """
    b = v.alphabet.size
    aligned_ok = aligned_detail = None
    unaligned_ok = unaligned_detail = None

    if len(v) % (m * n) == 0 and len(v) >= m * n:
        eps = discrete_discrepancy(v, m * n).delta
        lhs = discrete_discrepancy(v, n).delta
        bound = Fraction(b ** ((m - 1) * n)) * eps
        aligned_ok = lhs <= bound
        aligned_detail = {
            "delta_n": lhs,
            "delta_mn": eps,
            "factor": b ** ((m - 1) * n),
            "bound": bound,
        }

    if m < n and len(v) % n == 0 and len(v) >= n:
        eps = discrete_discrepancy(v, n).delta
        worst = None
        ok = True
        for value in range(b**m):
            u = v.alphabet.render_value(value, m)
            c = occurrences(v.text, u)
            bound = (
                len(v) * (Fraction(m - 1, n) + Fraction(1, b**m) + b**n * eps)
                - (m - 1)
            )
            slack = bound - c
            if worst is None or slack < worst[1]:
                worst = (u, slack)
            if c > bound:
                ok = False
        unaligned_ok = ok
        unaligned_detail = {"delta_n": eps, "worst": worst}

    return ConversionReport(
        aligned_ok=aligned_ok,
        aligned_detail=aligned_detail,
        unaligned_ok=unaligned_ok,
        unaligned_detail=unaligned_detail,
    )
