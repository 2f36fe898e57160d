"""Command-line interface.

Exit codes: 0 success, 1 statistical test failure, 2 usage error, 3 I/O error.

Raw dumps (``sample``) are headerless little-endian words: 32-bit for
mt19937, 64-bit for pcg64 and csprng.  A sidecar ``<out>.json`` records the
generator, word size, count and seed descriptor.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bitgen import GENERATORS, MT19937, PCG64, ChaCha20
from .dpmech import LaplaceMechanism
from .parallel import BlockLedger, BlockOverlapError, LedgerCorruptError
from .seedseq import SeedSequence, format_seed, parse_seed
from .stattests import exhaustive_bias_scan, first_output_bias_scan, run_battery

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3

LEDGER_ENV = "DPSEEDKIT_LEDGER"
_CHUNK = 1 << 16
_WORD_DTYPES = {32: "<u4", 64: "<u8"}


class UsageError(Exception):
    pass


def _seed_arg(text: str) -> int:
    try:
        return parse_seed(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load_descriptor(text: str) -> SeedSequence:
    """A descriptor given inline as JSON or as a path to a JSON file."""
    path = Path(text)
    if not text.lstrip().startswith("{") and path.exists():
        text = path.read_text(encoding="utf-8")
    try:
        return SeedSequence.from_descriptor(text)
    except (ValueError, TypeError) as exc:  # json.JSONDecodeError is a ValueError
        raise UsageError(f"bad descriptor: {exc}") from None


def _seed_sequence(args, *, required: bool = False) -> SeedSequence | None:
    if args.seed is not None and args.descriptor is not None:
        raise UsageError("--seed and --descriptor are mutually exclusive")
    if args.descriptor is not None:
        return _load_descriptor(args.descriptor)
    if args.seed is not None:
        return SeedSequence(args.seed)
    if required:
        raise UsageError("a --seed or --descriptor is required")
    return None


def _make_generator(name: str, seq: SeedSequence | None):
    if name == "csprng":
        return ChaCha20()
    if seq is None:
        seq = SeedSequence()
    return {"pcg64": PCG64, "mt19937": MT19937}[name].from_seed_sequence(seq)


def _dump(out: Path, gen, n_words: int) -> None:
    dtype = _WORD_DTYPES[gen.word_size]
    with open(out, "wb") as fh:
        remaining = n_words
        while remaining:
            take = min(remaining, _CHUNK)
            fh.write(gen.random_raw(take).astype(dtype).tobytes())
            remaining -= take


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


# --------------------------------------------------------------------------
# subcommands


def cmd_entropy(args) -> int:
    print(format_seed(SeedSequence().entropy))
    return EXIT_OK


def cmd_spawn(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    seq = _seed_sequence(args, required=True)
    seq = SeedSequence(seq.entropy, spawn_key=seq.spawn_key, n_children_spawned=args.start)
    _emit([child.to_descriptor() for child in seq.spawn(args.n)])
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.n < 0:
        raise UsageError("--n must be non-negative")
    seq = _seed_sequence(args)
    if args.generator == "csprng" and seq is not None:
        raise UsageError("the csprng cannot be seeded")
    if args.generator != "csprng" and seq is None:
        seq = SeedSequence()
        print(f"entropy: {format_seed(seq.entropy)}", file=sys.stderr)
    gen = _make_generator(args.generator, seq)
    out = Path(args.out)
    _dump(out, gen, args.n)
    meta = {
        "generator": args.generator,
        "word_size": gen.word_size,
        "byte_order": "little",
        "n_words": args.n,
        "seed": seq.to_descriptor() if seq is not None else None,
    }
    Path(f"{out}.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_test(args) -> int:
    path = Path(args.input)
    word_size = args.word_size
    sidecar = Path(f"{path}.json")
    if word_size is None and sidecar.exists():
        try:
            word_size = int(json.loads(sidecar.read_text(encoding="utf-8"))["word_size"])
        except (ValueError, KeyError, TypeError):
            print(f"error: unreadable sidecar {sidecar}", file=sys.stderr)
            return EXIT_IO
    word_size = word_size or 64
    if word_size not in _WORD_DTYPES:
        raise UsageError("--word-size must be 32 or 64")
    raw = path.read_bytes()
    width = word_size // 8
    if not raw or len(raw) % width:
        print(f"error: {path} is not a whole number of {word_size}-bit words", file=sys.stderr)
        return EXIT_IO
    words = np.frombuffer(raw, dtype=_WORD_DTYPES[word_size]).astype(f"u{width}")
    reports = run_battery(words, word_size, args.alpha)
    passed = all(r.passed for r in reports)
    _emit({
        "input": str(path),
        "word_size": word_size,
        "n_words": int(words.size),
        "alpha": args.alpha,
        "passed": passed,
        "reports": [r.to_dict() for r in reports],
    })
    return EXIT_OK if passed else EXIT_FAIL


def cmd_bench(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    names = [args.generator] if args.generator else list(GENERATORS)
    results = []
    for name in names:
        gen = _make_generator(name, SeedSequence(0) if name != "csprng" else None)
        start = time.perf_counter()
        gen.random_raw(args.n)
        elapsed = time.perf_counter() - start
        rate = args.n / elapsed if elapsed > 0 else float("inf")
        results.append({
            "generator": name,
            "n_words": args.n,
            "word_size": gen.word_size,
            "seconds": elapsed,
            "words_per_second": rate,
            "bytes_per_second": rate * gen.word_size / 8,
        })
    results.sort(key=lambda r: -r["bytes_per_second"])
    _emit(results)
    return EXIT_OK


def cmd_dpnoise(args) -> int:
    try:
        mech = LaplaceMechanism(args.epsilon, args.sensitivity, random_state=args.seed)
        print(repr(mech.randomise(args.value)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK


def cmd_block(args) -> int:
    ledger_path = args.ledger or os.environ.get(LEDGER_ENV)
    if not ledger_path:
        raise UsageError(f"set --ledger or {LEDGER_ENV} to record block assignments")
    seq = _seed_sequence(args, required=True)
    desc = seq.to_descriptor()
    stream_id = args.stream_id or "pcg64:{}:{}".format(
        desc["entropy"] if isinstance(desc["entropy"], str) else ",".join(desc["entropy"]),
        ".".join(map(str, desc["spawn_key"])),
    )
    ledger = BlockLedger(ledger_path)
    try:
        block = ledger.assign(stream_id, args.task, args.n)
    except BlockOverlapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.out:
        gen = PCG64.from_seed_sequence(seq).advance(block.offset)
        _dump(Path(args.out), gen, block.length)
    _emit({
        "stream_id": block.stream_id,
        "task": block.task,
        "offset": block.offset,
        "length": block.length,
        "seed": desc,
    })
    return EXIT_OK


def cmd_biasscan(args) -> int:
    try:
        targets = [int(t) for t in args.targets.split(",") if t]
    except ValueError:
        raise UsageError("--targets must be a comma-separated list of integers") from None
    if args.exhaustive:
        report = exhaustive_bias_scan(
            targets,
            start=args.start,
            stop=args.stop,
            small_limit=args.small_limit,
            workers=args.workers,
        )
    else:
        if args.n < 1:
            raise UsageError("--n must be at least 1")
        seq = SeedSequence(args.seed) if args.seed is not None else SeedSequence()
        seeds = PCG64.from_seed_sequence(seq).random_raw(args.n) >> np.uint64(32)
        report = first_output_bias_scan(seeds, targets)
    _emit(report.to_dict())
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpseedkit", description="Reproducible and secure randomness for DP workloads."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def seed_flags(p, descriptor=True):
        p.add_argument("--seed", type=_seed_arg, help="decimal seed of any length")
        if descriptor:
            p.add_argument("--descriptor", help="spawn descriptor: inline JSON or a file path")

    p = sub.add_parser("entropy", help="print 128 fresh bits of entropy as a decimal seed")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("spawn", help="print child seed descriptors as JSON")
    seed_flags(p)
    p.add_argument("--n", type=int, default=1, help="number of children")
    p.add_argument("--start", type=int, default=0,
                   help="children already spawned from this sequence (default 0)")
    p.set_defaults(func=cmd_spawn)

    p = sub.add_parser("sample", help="write a raw little-endian word dump")
    seed_flags(p)
    p.add_argument("--generator", choices=GENERATORS, default="pcg64")
    p.add_argument("--n", type=int, required=True, help="number of words")
    p.add_argument("--out", required=True, help="output path; metadata goes to OUT.json")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("test", help="run the statistical battery on a raw dump")
    p.add_argument("input")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--word-size", type=int, choices=(32, 64),
                   help="default: from the sidecar, else 64")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("bench", help="measure generator throughput")
    p.add_argument("--generator", choices=GENERATORS, help="default: all")
    p.add_argument("--n", type=int, default=200_000)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("dpnoise", help="apply the Laplace mechanism to one value")
    seed_flags(p, descriptor=False)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--sensitivity", type=float, default=1.0)
    p.add_argument("--value", type=float, required=True)
    p.set_defaults(func=cmd_dpnoise)

    p = sub.add_parser("block", help="assign a PCG64 block through the ledger")
    seed_flags(p)
    p.add_argument("--stream-id", help="default: derived from the seed")
    p.add_argument("--task", type=int, required=True)
    p.add_argument("--n", type=int, required=True, help="block length in words")
    p.add_argument("--ledger", help=f"ledger file (default: ${LEDGER_ENV})")
    p.add_argument("--out", help="also dump the block's words here")
    p.set_defaults(func=cmd_block)

    p = sub.add_parser("biasscan", help="scan MT19937 single-word seeds for missing first outputs")
    seed_flags(p, descriptor=False)
    p.add_argument("--targets", default="3,7")
    p.add_argument("--n", type=int, default=1_000_000, help="sampled seeds")
    p.add_argument("--exhaustive", action="store_true", help="scan [start, stop) completely")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--stop", type=int, default=1 << 32)
    p.add_argument("--small-limit", type=int, default=1 << 16)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_biasscan)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LedgerCorruptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
