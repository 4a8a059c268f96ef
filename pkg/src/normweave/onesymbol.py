"""Sigma-only insertion scheduled by ordered necklaces over the larger alphabet.

The transducer expands the input in stages: stage i cuts the input into
blocks whose symbols are copied verbatim, while the extra symbol sigma is
planted exactly where the lexicographic concatenation of all length-2^i
words over the extended alphabet carries sigma.  The retraction (deleting
every sigma) then reproduces the input exactly, and the sigma positions are
computable from the schedule alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .errors import InputUnderrun, NormweaveError
from .words import Alphabet, Word

STAR = "*"

_DIGIT_CACHE_LIMIT = 100_000


class ExpansionOrder:
    """The insertion pattern of one order: where the n-ordered necklace over
    the extended alphabet carries sigma, and the bookkeeping around it."""

    def __init__(self, alphabet_hat: Alphabet, n: int):
        if n < 1:
            raise NormweaveError("expansion order must be at least 1")
        self.alphabet_hat = alphabet_hat
        self.n = n
        bh = alphabet_hat.size
        self.total_len = n * bh**n  # symbols emitted per block
        self.input_len = n * (bh - 1) * bh ** (n - 1)  # symbols consumed per block
        self._flags: Optional[list[bool]] = None
        if bh**n <= _DIGIT_CACHE_LIMIT:
            self._flags = list(self._iter_flags())

    def _iter_flags(self) -> Iterator[bool]:
        bh = self.alphabet_hat.size
        sig = bh - 1
        n = self.n
        for value in range(bh**n):
            digits = []
            for _ in range(n):
                value, d = divmod(value, bh)
                digits.append(d == sig)
            yield from reversed(digits)

    def sigma_flags(self) -> Iterator[bool]:
        """Per output position of one block: is this position a sigma?"""
        if self._flags is not None:
            return iter(self._flags)
        return self._iter_flags()

    def sigma_offsets_upto(self, limit: int) -> Iterator[int]:
        """1-based sigma positions within one block, up to ``limit``."""
        for off, is_sig in enumerate(self.sigma_flags(), start=1):
            if off > limit:
                return
            if is_sig:
                yield off

    def wildcard_pattern(self) -> str:
        """The block pattern with sigma kept and every other symbol starred."""
        sig_ch = self.alphabet_hat.symbols[-1]
        return "".join(sig_ch if f else STAR for f in self.sigma_flags())

    def wildcard_index(self, i: int) -> int:
        """Number of non-sigma positions among the first i of the pattern."""
        if not 1 <= i <= self.total_len:
            raise NormweaveError(f"index {i} out of range 1..{self.total_len}")
        count = 0
        for off, is_sig in enumerate(self.sigma_flags(), start=1):
            if off > i:
                break
            count += not is_sig
        return count


def wildcard(w: Word) -> str:
    """Keep sigma (the last-indexed symbol), star out everything else."""
    sig = w.alphabet.size - 1
    sig_ch = w.alphabet.symbols[-1]
    return "".join(sig_ch if d == sig else STAR for d in w.data)


def retract(w: Word) -> Word:
    """Delete every sigma; the result lives over the alphabet without it."""
    base = Alphabet(w.alphabet.symbols[:-1])
    sig = w.alphabet.size - 1
    return Word(base, tuple(d for d in w.data if d != sig))


def retract_text(text: str, sigma: str) -> str:
    return text.replace(sigma, "")


def wildcard_index(alphabet_hat: Alphabet, n: int, i: int) -> int:
    """Input position fed by output position i of an order-n expansion."""
    return ExpansionOrder(alphabet_hat, n).wildcard_index(i)


def expand(n: int, v: Word, sigma: str) -> Word:
    """Blockwise order-n expansion of an A-word into the extended alphabet.

    Every input block of length n*|A|*|A+1|^(n-1) maps to an output block
    of length n*|A+1|^n; sigma goes exactly where the n-ordered necklace
    over the extended alphabet has it, and the remaining positions are
    filled from v left to right.  Deleting every sigma undoes the map.
    """
    hat = v.alphabet.extend(sigma)
    order = ExpansionOrder(hat, n)
    if len(v) % order.input_len:
        raise NormweaveError(
            f"input length {len(v)} is not a multiple of l_n = {order.input_len}"
        )
    sig = hat.size - 1
    out = []
    feed = iter(v.data)
    for _ in range(len(v) // order.input_len):
        for is_sig in order.sigma_flags():
            out.append(sig if is_sig else next(feed))
    return Word(hat, out)


@dataclass(frozen=True)
class ExpansionStage:
    """One stage of a schedule: ``t`` blocks of the order-``order`` expansion."""

    index: int
    order: int
    t: int
    input_block: int
    output_block: int

    @property
    def input_len(self) -> int:
        return self.t * self.input_block

    @property
    def output_len(self) -> int:
        return self.t * self.output_block

    def epsilon(self) -> float:
        """The discrepancy budget 1/sqrt(t) tracked per stage."""
        if self.t.bit_length() > 1020:
            return 0.0
        return 1.0 / math.sqrt(self.t)

    def epsilon_sq(self) -> Fraction:
        return Fraction(1, self.t)


class ExpansionSchedule:
    """Stage sequence for the sigma-only transducer.

    In ``paper`` mode, stage i uses order 2^i and the exact block count
    t_i = |A|^(l of order 2^(i+1)) * |A+1|^(2^(i+1)); all arithmetic is
    arbitrary precision and any physically reachable prefix stays inside
    stage 1.  In ``scaled`` mode the caller supplies the block counts; the
    order doubles per stage while counts last and the final stage then
    repeats unchanged, which keeps desk-scale prefixes statistically close
    to uniform while still crossing several stage boundaries.
    """

    def __init__(self, alphabet_hat: Alphabet, mode: str, ts: Optional[list[int]] = None):
        if mode not in ("paper", "scaled"):
            raise NormweaveError(f"unknown schedule mode {mode!r}")
        if mode == "scaled":
            if not ts:
                raise NormweaveError("scaled mode needs at least one block count")
            if any(t < 1 for t in ts):
                raise NormweaveError("block counts must be positive")
        self.alphabet_hat = alphabet_hat
        self.mode = mode
        self.ts = list(ts) if ts else None

    def ell(self, n: int) -> int:
        bh = self.alphabet_hat.size
        return n * (bh - 1) * bh ** (n - 1)

    def ell_hat(self, n: int) -> int:
        bh = self.alphabet_hat.size
        return n * self.alphabet_hat.size**n

    def paper_t(self, i: int) -> int:
        bh = self.alphabet_hat.size
        b = bh - 1
        return b ** self.ell(2 ** (i + 1)) * bh ** (2 ** (i + 1))

    def stages(self) -> Iterator[ExpansionStage]:
        i = 1
        while True:
            if self.mode == "paper":
                order = 2**i
                t = self.paper_t(i)
            else:
                order = 2 ** min(i, len(self.ts))
                t = self.ts[min(i, len(self.ts)) - 1]
            yield ExpansionStage(
                index=i,
                order=order,
                t=t,
                input_block=self.ell(order),
                output_block=self.ell_hat(order),
            )
            i += 1

    def input_offsets(self, count: int) -> list[int]:
        """L_0..L_count: exact cumulative input consumption per stage."""
        out = [0]
        for stage in self.stages():
            if stage.index > count:
                break
            out.append(out[-1] + stage.input_len)
        return out

    def block_length_bound_report(self, stages: int = 2) -> list[dict]:
        """Check l_{2^(i+1)} <= log |v_i| per stage, in base 2 and base |A+1|.

        The logarithm base is not pinned down; both readings are reported
        (base 2 holds for every alphabet, base |A+1| generally does not).
        """
        bh = self.alphabet_hat.size
        report = []
        for stage in self.stages():
            if stage.index > stages:
                break
            ell_next = self.ell(2 * stage.order)
            v_len = stage.input_len
            report.append(
                {
                    "stage": stage.index,
                    "ell_next": ell_next,
                    "holds_base2": 2**ell_next <= v_len,
                    "holds_base_hat": bh**ell_next <= v_len,
                }
            )
        return report


def paper_schedule(alphabet: Alphabet, sigma: str) -> ExpansionSchedule:
    """The exact block schedule from the construction's correctness proof."""
    return ExpansionSchedule(alphabet.extend(sigma), "paper")


def scaled_schedule(alphabet: Alphabet, sigma: str, ts: Iterable[int]) -> ExpansionSchedule:
    """A desk-scale schedule with caller-chosen block counts per stage."""
    return ExpansionSchedule(alphabet.extend(sigma), "scaled", list(ts))


def one_symbol_stream(
    source: Iterable[str],
    schedule: ExpansionSchedule,
) -> Iterator[str]:
    """Expand the input stream stage by stage, inserting only sigma.

    Consumes input lazily, so astronomically long stages are fine as long
    as the consumer stops pulling.  Raises InputUnderrun if the source
    ends in the middle of an output block.
    """
    sig_ch = schedule.alphabet_hat.symbols[-1]
    feed = iter(source)
    consumed = 0
    for stage in schedule.stages():
        order = ExpansionOrder(schedule.alphabet_hat, stage.order)
        for _ in range(stage.t):
            for is_sig in order.sigma_flags():
                if is_sig:
                    yield sig_ch
                else:
                    try:
                        ch = next(feed)
                    except StopIteration:
                        raise InputUnderrun(
                            f"input underrun after {consumed} symbols "
                            f"(stage {stage.index}, order {stage.order})"
                        ) from None
                    consumed += 1
                    yield ch


def sigma_positions(schedule: ExpansionSchedule, upto: int) -> list[int]:
    """All sigma positions of the output stream up to position ``upto``,
    computed from the schedule alone (no input needed)."""
    if upto < 1:
        raise NormweaveError("upto must be at least 1")
    out: list[int] = []
    base = 0
    for stage in schedule.stages():
        if base >= upto:
            break
        order = ExpansionOrder(schedule.alphabet_hat, stage.order)
        lhat = order.total_len
        full: Optional[list[int]] = None
        for _ in range(stage.t):
            if base >= upto:
                break
            room = upto - base
            if room >= lhat:
                if full is None:
                    full = list(order.sigma_offsets_upto(lhat))
                out.extend(base + off for off in full)
            else:
                out.extend(base + off for off in order.sigma_offsets_upto(room))
            base += lhat
    return out
