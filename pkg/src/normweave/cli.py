"""Command-line interface: generation, insertion, verification, statistics.

Subcommands compose over a plain text stream format (whitespace ignored on
read, lines wrapped at 120 symbols on write).  Verification and statistics
emit one JSON object per line; exit status is 0 on success, 1 when a check
fails, 2 on usage or malformed input.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from fractions import Fraction
from typing import Iterator, Optional

from . import analysis, liberal, necklaces, onesymbol
from .errors import NormweaveError
from .words import Alphabet, read_symbols, write_symbols

DEFAULT_SIGMA = "s"


def _alphabet(args) -> Alphabet:
    if not getattr(args, "alphabet", None):
        raise NormweaveError("--alphabet is required for this command")
    return Alphabet(args.alphabet)


def _open_in(args):
    if getattr(args, "infile", None) and args.infile != "-":
        return open(args.infile, "r", encoding="utf-8")
    return sys.stdin


def _open_out(args):
    if getattr(args, "out", None) and args.out != "-":
        return open(args.out, "w", encoding="utf-8")
    return sys.stdout


def _read_word(args, alphabet: Alphabet):
    stream = _open_in(args)
    try:
        text = read_symbols(stream)
    finally:
        if stream is not sys.stdin:
            stream.close()
    return alphabet.word(text)


def _emit(args, payload: dict) -> None:
    if getattr(args, "format", "json") == "text":
        parts = [f"{k}={v}" for k, v in payload.items()]
        print("  ".join(parts))
    else:
        print(json.dumps(payload, default=str))


def _write_stream(args, symbols) -> None:
    out = _open_out(args)
    try:
        write_symbols(out, symbols)
    finally:
        if out is not sys.stdout:
            out.close()


def _schedule(args, alphabet: Alphabet):
    if args.schedule == "paper":
        return onesymbol.paper_schedule(alphabet, args.sigma)
    if not args.t:
        raise NormweaveError("scaled schedule needs --t with block counts")
    ts = [int(x) for x in args.t.split(",") if x]
    return onesymbol.scaled_schedule(alphabet, args.sigma, ts)


def _check_sigma(alphabet: Alphabet, sigma: str) -> None:
    if len(sigma) != 1:
        raise NormweaveError("sigma must be a single character")
    if sigma in alphabet:
        raise NormweaveError(f"sigma {sigma!r} must not belong to the alphabet")


# ---------------------------------------------------------------- gen


def cmd_gen(args) -> int:
    alphabet = _alphabet(args)
    if args.what in ("ordered", "arith") and args.n is None:
        raise NormweaveError(f"gen {args.what} needs --n")
    if args.what in ("eulerian", "nested") and (args.n is None or args.k is None):
        raise NormweaveError(f"gen {args.what} needs --n and --k")
    if args.what == "ordered":
        word = necklaces.ordered_necklace(alphabet, args.n).word.text
    elif args.what == "arith":
        word = necklaces.arithmetic_necklace(alphabet, args.n, args.r).word.text
    elif args.what == "eulerian":
        word = necklaces.eulerian_perfect_necklace(alphabet, args.n, args.k)[0].word.text
    elif args.what == "nested":
        word = necklaces.nested_perfect(alphabet, args.n, args.k).word.text
    elif args.what == "stream-perfect":
        if args.length is None:
            raise NormweaveError("stream-perfect needs --length")
        word = itertools.islice(
            necklaces.perfect_stream(alphabet), args.length
        )
    elif args.what == "stream-nested":
        gen = necklaces.nested_stream(alphabet, args.dmax)
        word = itertools.islice(gen, args.length) if args.length else gen
    else:  # pragma: no cover - argparse restricts choices
        raise NormweaveError(f"unknown generator {args.what}")
    _write_stream(args, word)
    return 0


# ---------------------------------------------------------------- insert


def cmd_insert(args) -> int:
    alphabet = _alphabet(args)
    _check_sigma(alphabet, args.sigma)
    if args.mode == "liberal":
        return _insert_liberal(args, alphabet)
    return _insert_one_symbol(args, alphabet)


def _insert_liberal(args, alphabet: Alphabet) -> int:
    if args.stream:
        if args.length is None:
            raise NormweaveError("--stream needs --length")
        text = "".join(
            itertools.islice(
                liberal.liberal_insert_stream(alphabet, args.sigma), args.length
            )
        )
        _write_stream(args, text)
        gaps = analysis.sigma_gaps(text, args.sigma, mode="linear")
        worst = _theorem1_worst(gaps.positions, alphabet.size)
        report = {
            "check": "insert.liberal.stream",
            "length": len(text),
            "sigma_count": len(gaps.positions),
            "max_gap": gaps.max_gap,
            "bound": liberal.theorem1_gap_bound(
                alphabet.size, alphabet.size + 1, max(len(text), 3)
            ),
            "theorem1_ok": worst is None or worst[1] >= 0,
        }
        print(json.dumps(report), file=sys.stderr)
        return 0
    if args.n is None or args.k is None:
        raise NormweaveError("liberal insertion needs --n and --k (or --stream)")
    word = _read_word(args, alphabet)
    result = liberal.liberal_insert(word, args.sigma, n=args.n, k=args.k)
    _write_stream(args, result.word.text)
    report = {
        "check": "insert.liberal",
        "perfect": analysis.is_perfect(result.word, args.n, args.k).ok,
        "max_gap": result.max_gap,
        "bound": result.gap_bound,
        "subsequence": result.subsequence_ok,
    }
    print(json.dumps(report), file=sys.stderr)
    return 0


def _theorem1_worst(positions, b: int) -> Optional[tuple[int, int]]:
    """Worst (N, slack) of the stream gap bound over consecutive sigmas."""
    worst = None
    bh = b + 1
    for a, c in zip(positions, positions[1:]):
        gap = c - a - 1
        N = max(a, b + 1)
        if N >= c:
            continue
        slack = liberal.theorem1_gap_bound(b, bh, N) - gap
        if worst is None or slack < worst[1]:
            worst = (N, slack)
    return worst


def _insert_one_symbol(args, alphabet: Alphabet) -> int:
    if args.length is None:
        raise NormweaveError("one-symbol insertion needs --length")
    schedule = _schedule(args, alphabet)
    warn = None
    if args.infile:
        stream = _open_in(args)
        try:
            source = iter(read_symbols(stream))
        finally:
            if stream is not sys.stdin:
                stream.close()
        warn = "input stream is not verified to be a nested-perfect concatenation"
    elif args.perfect:
        source = necklaces.perfect_stream(alphabet)
        warn = "input is the perfect-necklace stream, not the nested one"
    else:
        source = necklaces.nested_stream(alphabet, args.dmax)
    text = "".join(
        itertools.islice(onesymbol.one_symbol_stream(source, schedule), args.length)
    )
    _write_stream(args, text)
    report = {
        "check": "insert.one-symbol",
        "length": len(text),
        "sigma_count": text.count(args.sigma),
        "consumed": len(text) - text.count(args.sigma),
        "schedule": args.schedule,
    }
    if warn:
        report["warning"] = warn
    print(json.dumps(report), file=sys.stderr)
    return 0


def cmd_sigma_positions(args) -> int:
    alphabet = _alphabet(args)
    _check_sigma(alphabet, args.sigma)
    schedule = _schedule(args, alphabet)
    out = _open_out(args)
    try:
        for pos in onesymbol.sigma_positions(schedule, args.upto):
            out.write(f"{pos}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_retract(args) -> int:
    stream = _open_in(args)
    try:
        text = read_symbols(stream)
    finally:
        if stream is not sys.stdin:
            stream.close()
    _write_stream(args, onesymbol.retract_text(text, args.sigma))
    return 0


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    if args.what == "perfect":
        alphabet = _alphabet(args)
        word = _read_word(args, alphabet)
        report = analysis.is_perfect(word, args.n, args.k)
        payload = {
            "check": "perfect",
            "is_perfect": report.ok,
            "n": args.n,
            "k": args.k,
            "length": report.length,
        }
        if not report.ok:
            payload["violation_word"] = report.violation_word
            payload["violation_residues"] = list(report.violation_residues or ())
        _emit(args, payload)
        return 0 if report.ok else 1

    if args.what == "nested":
        alphabet = _alphabet(args)
        word = _read_word(args, alphabet)
        ok = analysis.is_nested(word, args.n, args.k)
        _emit(args, {"check": "nested", "is_nested": ok, "n": args.n, "k": args.k})
        return 0 if ok else 1

    if args.what == "crucial":
        alphabet = _alphabet(args)
        word = _read_word(args, alphabet)
        split = None
        if args.point3:
            half = len(word) // alphabet.size
            split = (word.segment(1, half), word.segment(half + 1, 2 * half))
            if 2 * half != len(word):
                raise NormweaveError("--point3 needs an even split")
        report = analysis.check_crucial(word, args.n, args.k, nested_split=split)
        _emit(
            args,
            {
                "check": "crucial",
                "ok": report.ok,
                "worst_slack": report.worst_slack,
                "advisory_slack": report.advisory_slack,
                "violations": report.violations[:10],
            },
        )
        return 0 if report.ok else 1

    if args.what == "gaps":
        stream = _open_in(args)
        try:
            text = read_symbols(stream)
        finally:
            if stream is not sys.stdin:
                stream.close()
        report = analysis.sigma_gaps(text, args.sigma, mode=args.mode, bound=args.bound)
        ok = True
        payload = {
            "check": "gaps",
            "sigma_count": len(report.positions),
            "max_gap": report.max_gap,
            "mode": report.mode,
        }
        if args.bound is not None:
            ok = report.max_gap <= args.bound
            payload["bound"] = args.bound
            payload["pass"] = ok
        if args.theorem1:
            worst = _theorem1_worst(report.positions, args.theorem1)
            payload["theorem1_worst_margin"] = None if worst is None else worst[1]
            payload["theorem1_worst_at"] = None if worst is None else worst[0]
            if worst is not None and worst[1] < 0:
                ok = False
        if args.plot:
            from . import plotting

            bound_fn = None
            if args.theorem1:
                bsz = args.theorem1
                bound_fn = lambda x: liberal.theorem1_gap_bound(bsz, bsz + 1, x)
            payload["figure"] = plotting.plot_gap_profile(
                report.positions, len(text), args.plot, bound_fn=bound_fn, sigma=args.sigma
            )
        _emit(args, payload)
        return 0 if ok else 1

    if args.what == "subsequence":
        stream = _open_in(args)
        try:
            haystack = read_symbols(stream)
        finally:
            if stream is not sys.stdin:
                stream.close()
        with open(args.needle, "r", encoding="utf-8") as f:
            needle = read_symbols(f)
        ok, skipped = analysis.is_subsequence(needle, haystack)
        payload = {"check": "subsequence", "embeds": ok, "skipped": len(skipped)}
        if args.sigma_only:
            only = set(skipped) <= {args.sigma}
            payload["skipped_all_sigma"] = only
            ok = ok and only
        _emit(args, payload)
        return 0 if ok else 1

    raise NormweaveError(f"unknown verification {args.what}")  # pragma: no cover


# ---------------------------------------------------------------- stats


def cmd_stats(args) -> int:
    alphabet = _alphabet(args)
    stream = _open_in(args)
    try:
        text = read_symbols(stream)
    finally:
        if stream is not sys.stdin:
            stream.close()

    if args.what == "delta":
        word = alphabet.word(text)
        report = analysis.discrete_discrepancy(word, args.ell)
        payload = {
            "check": "delta",
            "ell": args.ell,
            "windows": report.windows,
            "delta": float(report.delta),
            "delta_exact": str(report.delta),
            "argmax_word": report.argmax_word,
        }
        if args.plot:
            from . import plotting

            entries = []
            N = 64
            while N <= len(text):
                entries.append(
                    (N, float(analysis.discrete_discrepancy(alphabet.word(text[:N]), args.ell).delta))
                )
                N *= 2
            payload["figure"] = plotting.plot_delta_profile(entries, args.plot)
        _emit(args, payload)
        return 0

    if args.what == "ps":
        stat, per_len = analysis.ps_statistic(text, alphabet, args.max_len)
        payload = {
            "check": "ps",
            "max_len": args.max_len,
            "statistic": stat,
            "per_length": {str(m): v for m, v in sorted(per_len.items())},
        }
        if args.plot:
            from . import plotting

            payload["figure"] = plotting.plot_ps_table(per_len, alphabet.size, args.plot)
        _emit(args, payload)
        return 0

    if args.what == "stard":
        value = analysis.star_discrepancy(text, alphabet, args.N)
        payload = {"check": "stard", "N": args.N, "star_discrepancy": value}
        if args.plot:
            from . import plotting

            entries = []
            N = 64
            while N <= args.N:
                entries.append((N, analysis.star_discrepancy(text, alphabet, N)))
                N *= 2
            payload["figure"] = plotting.plot_star_decay(entries, args.plot)
        _emit(args, payload)
        return 0

    raise NormweaveError(f"unknown statistic {args.what}")  # pragma: no cover


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="normweave",
        description="Perfect-necklace generation, alphabet-extension insertion, "
        "and exact verification of the combinatorial guarantees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, alphabet=True, sigma=False, infile=False, out=True):
        if alphabet:
            p.add_argument("--alphabet", required=True, help="ordered alphabet symbols")
        if sigma:
            p.add_argument("--sigma", default=DEFAULT_SIGMA, help="extra symbol (default 's')")
        if infile:
            p.add_argument("--in", dest="infile", default=None, help="input stream file (default stdin)")
        if out:
            p.add_argument("--out", default=None, help="output file (default stdout)")

    g = sub.add_parser("gen", help="generate necklaces and streams")
    g.add_argument("what", choices=["ordered", "arith", "eulerian", "nested", "stream-perfect", "stream-nested"])
    add_common(g)
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--k", type=int, default=None)
    g.add_argument("--r", type=int, default=1, help="arithmetic step (coprime with |A|)")
    g.add_argument("--dmax", type=int, default=3)
    g.add_argument("--length", type=int, default=None)
    g.set_defaults(func=cmd_gen)

    i = sub.add_parser("insert", help="alphabet-extension insertion")
    i.add_argument("mode", choices=["liberal", "one-symbol"])
    add_common(i, sigma=True, infile=True)
    i.add_argument("--n", type=int, default=None)
    i.add_argument("--k", type=int, default=None)
    i.add_argument("--stream", action="store_true", help="liberal: transform the perfect stream")
    i.add_argument("--length", type=int, default=None)
    i.add_argument("--schedule", choices=["paper", "scaled"], default="paper")
    i.add_argument("--t", default=None, help="scaled schedule block counts, comma separated")
    i.add_argument("--nested", action="store_true", help="one-symbol: read the nested stream")
    i.add_argument("--perfect", action="store_true", help="one-symbol: read the perfect stream")
    i.add_argument("--dmax", type=int, default=3)
    i.set_defaults(func=cmd_insert)

    sp = sub.add_parser("sigma-positions", help="positions of sigma from the schedule alone")
    add_common(sp, sigma=True)
    sp.add_argument("--schedule", choices=["paper", "scaled"], default="paper")
    sp.add_argument("--t", default=None)
    sp.add_argument("--upto", type=int, required=True)
    sp.set_defaults(func=cmd_sigma_positions)

    r = sub.add_parser("retract", help="delete every sigma from a stream")
    add_common(r, alphabet=False, sigma=True, infile=True)
    r.set_defaults(func=cmd_retract)

    v = sub.add_parser("verify", help="check combinatorial guarantees")
    v.add_argument("what", choices=["perfect", "nested", "crucial", "gaps", "subsequence"])
    v.add_argument("--alphabet", default=None)
    v.add_argument("--sigma", default=DEFAULT_SIGMA)
    v.add_argument("--in", dest="infile", default=None)
    v.add_argument("--n", type=int, default=None)
    v.add_argument("--k", type=int, default=None)
    v.add_argument("--point3", action="store_true", help="crucial: also check the nested split")
    v.add_argument("--bound", type=int, default=None)
    v.add_argument("--mode", choices=["circular", "linear"], default="circular")
    v.add_argument("--theorem1", type=int, default=None, metavar="BASE_SIZE",
                   help="check the stream gap bound for this base alphabet size")
    v.add_argument("--needle", default=None, help="subsequence: file with the embedded word")
    v.add_argument("--sigma-only", action="store_true", help="subsequence: require all skipped symbols to equal sigma")
    v.add_argument("--plot", default=None, help="render a figure to this path")
    v.add_argument("--format", choices=["json", "text"], default="json")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("stats", help="discrepancy and frequency statistics")
    s.add_argument("what", choices=["delta", "ps", "stard"])
    add_common(s, infile=True, out=False)
    s.add_argument("--ell", type=int, default=1)
    s.add_argument("--max-len", type=int, default=3)
    s.add_argument("--N", type=int, default=256)
    s.add_argument("--plot", default=None)
    s.add_argument("--format", choices=["json", "text"], default="json")
    s.set_defaults(func=cmd_stats)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NormweaveError as exc:
        print(f"normweave: error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
