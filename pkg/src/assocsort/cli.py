"""Command line front end: ``assocsort sort|bench|trace``.

Exit codes: 0 ok, 1 usage, 2 I/O or parse error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Optional

import numpy as np

from .drivers import VARIANTS, sort
from .harness import (ALGORITHMS, DISTRIBUTIONS, GeneratorSpec, VerificationError,
                      generate, rows_to_csv, run_benchmark, trace_lines)
from .wordmodel import ModelError, WordModel

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def read_values(path: Optional[str], fmt: str, model: WordModel) -> np.ndarray:
    limit = 1 << model.w
    try:
        if fmt == "binary":
            raw = sys.stdin.buffer.read() if path in (None, "-") else open(path, "rb").read()
            if len(raw) % 8:
                raise InputError(f"binary input length {len(raw)} is not a multiple of 8")
            vals = np.frombuffer(raw, dtype="<u8").astype(np.uint64)
            if model.w < 64 and vals.size and int(vals.max()) >= limit:
                raise InputError(f"value {int(vals.max())} does not fit in {model.w} bits")
            return vals
        text = sys.stdin.read() if path in (None, "-") else open(path, encoding="utf-8").read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        if not s.isdigit():
            raise InputError(f"line {lineno}: {s!r} is not a non-negative integer")
        v = int(s)
        if v >= limit:
            raise InputError(f"line {lineno}: {v} does not fit in {model.w} bits")
        out.append(v)
    return np.array(out, dtype=np.uint64)


def write_values(path: Optional[str], fmt: str, values: np.ndarray):
    if fmt == "binary":
        data = values.astype("<u8").tobytes()
    else:
        data = "".join(f"{int(v)}\n" for v in values).encode()
    try:
        if path in (None, "-"):
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
        else:
            with open(path, "wb") as f:
                f.write(data)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror}") from e


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror}") from e


def cmd_sort(args) -> int:
    model = WordModel(args.w)
    vals = read_values(args.input, args.format, model)
    report = sort(vals, model, variant=args.variant)
    write_values(args.output, args.format, vals)
    if args.report:
        print(f"n={len(vals)} passes={report.passes} scanned_words={report.scanned_words} "
              f"companions={report.companions}", file=sys.stderr)
    return EXIT_OK


def _specs(args):
    for n in args.n:
        if n < 0:
            raise UsageError(f"--n must be >= 0, got {n}")
    if args.m is not None:
        sizes = [(n, m) for n in args.n for m in args.m]
    else:
        for b in args.beta:
            if b <= 0:
                raise UsageError(f"--beta must be positive, got {b:g}")
        sizes = [(n, max(1, round(b * n))) for n in args.n for b in args.beta]
    return [GeneratorSpec(d, n, m, seed)
            for d in args.dist for (n, m) in sizes
            for seed in range(args.seed, args.seed + args.seeds)]


def cmd_bench(args) -> int:
    algos = list(ALGORITHMS) if "all" in args.algo else args.algo
    specs = _specs(args)
    try:
        rows = run_benchmark(specs, algos, args.repetitions, WordModel(args.w))
    except VerificationError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY
    if args.emit == "jsonl":
        text = "".join(json.dumps(dataclasses.asdict(r)) + "\n" for r in rows)
    else:
        text = rows_to_csv(rows)
    _write_text(args.output, text)
    return EXIT_OK


def cmd_trace(args) -> int:
    model = WordModel(args.w)
    if args.input is not None:
        vals = read_values(args.input, args.format, model)
    else:
        if args.m is None and args.beta is None:
            raise UsageError("trace needs --input or generator flags (--dist, --n, --m|--beta)")
        m = args.m if args.m is not None else round(args.beta * args.n)
        if args.beta is not None and args.beta <= 0:
            raise UsageError(f"--beta must be positive, got {args.beta:g}")
        vals = generate(GeneratorSpec(args.dist, args.n, max(1, m), args.seed), model)
    report = sort(vals, model, variant=args.variant)
    if args.verify and vals.tolist() != sorted(vals.tolist()):
        print("verification failed: output is not sorted", file=sys.stderr)
        return EXIT_VERIFY
    _write_text(args.output, "".join(line + "\n" for line in trace_lines(report)))
    return EXIT_OK


def _width(parser):
    # simulated narrow words are for testing; hidden so nobody trips over them by accident
    parser.add_argument("--w", type=int, default=64, help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="assocsort", description="In-place associative integer sorting.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sort", help="sort a file of unsigned integers")
    s.add_argument("--input", "-i", help="input path (default stdin)")
    s.add_argument("--output", "-o", help="output path (default stdout)")
    s.add_argument("--format", choices=("text", "binary"), default="text")
    s.add_argument("--variant", choices=VARIANTS, default="sequential")
    s.add_argument("--report", action="store_true", help="print pass counters to stderr")
    _width(s)
    s.set_defaults(func=cmd_sort)

    b = sub.add_parser("bench", help="benchmark against baselines, CSV or JSON lines out")
    b.add_argument("--dist", nargs="+", choices=DISTRIBUTIONS, default=["uniform"])
    b.add_argument("--n", nargs="+", type=int, default=[4096])
    g = b.add_mutually_exclusive_group()
    g.add_argument("--m", nargs="+", type=int)
    g.add_argument("--beta", nargs="+", type=float, default=[1.0])
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    b.add_argument("--algo", nargs="+", choices=list(ALGORITHMS) + ["all"],
                   default=["sequential"])
    b.add_argument("--repetitions", type=int, default=1)
    b.add_argument("--emit", choices=("csv", "jsonl"), default="csv")
    b.add_argument("--output", "-o")
    _width(b)
    b.set_defaults(func=cmd_bench)

    t = sub.add_parser("trace", help="print one JSON line per sorting pass")
    t.add_argument("--input", "-i")
    t.add_argument("--format", choices=("text", "binary"), default="text")
    t.add_argument("--dist", choices=DISTRIBUTIONS, default="uniform")
    t.add_argument("--n", type=int, default=4096)
    g = t.add_mutually_exclusive_group()
    g.add_argument("--m", type=int)
    g.add_argument("--beta", type=float)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--variant", choices=VARIANTS, default="sequential")
    t.add_argument("--verify", action="store_true")
    t.add_argument("--output", "-o")
    _width(t)
    t.set_defaults(func=cmd_trace)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return EXIT_OK if not e.code else EXIT_USAGE
    if not 4 <= args.w <= 64:
        print(f"assocsort {args.command}: --w must be in [4, 64]", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"assocsort {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as e:
        print(f"assocsort {args.command}: {e}", file=sys.stderr)
        return EXIT_IO
    except ModelError as e:
        msg = str(e)
        print(f"assocsort {args.command}: {msg}", file=sys.stderr)
        return EXIT_USAGE if args.command == "bench" else EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
