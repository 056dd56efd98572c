"""
Command-line surface.

    quokka gen       write a benchmark circuit in raw format
    quokka finder    optimize a raw circuit (also the `finder` executable)
    quokka sim       run an optimized circuit (also the `Quokka` executable)
    quokka validate  check an optimized circuit against its raw original
    quokka bench     timed suites, CSV plus optional figures

Worker threads per rank come from the QUOKKA_WORKERS environment variable.
"""
from __future__ import annotations

import argparse
import configparser
import os
import sys

from .bench import SUITES, plot_rows, rows_to_csv, run_bench
from .circuit import (
    LayoutParams,
    ParseError,
    parse_optimized,
    parse_raw,
    serialize_optimized,
    serialize_raw,
)
from .generators import ALL_FAMILIES, generate
from .optimizer import OptimizeError, optimize
from .oracle import validate_order
from .simulator import SimulationError, Simulator

PASS_MESSAGE = "Passed all circuit order validations"


class CliError(Exception):
    pass


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("QUOKKA_WORKERS", "1")))
    except ValueError:
        return 1


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}")


def _infer_qubits(text: str) -> int:
    top = 0
    for line in text.splitlines():
        tokens = line.split()
        if len(tokens) >= 3:
            for tok in tokens[1:-1]:
                if tok.lstrip("-").isdigit():
                    top = max(top, int(tok))
    return top + 1


def _scan_optimized(text: str) -> tuple[int, int | None]:
    """(max block gate target, min CSQS rank position) from raw tokens."""
    max_target = 0
    min_rank: int | None = None
    lines = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    lines = [t for t in lines if t]
    i = 0
    while i < len(lines):
        try:
            count = int(lines[i][0])
            for toks in lines[i + 1:i + 1 + count]:
                if toks[0] == "CSQS":
                    m = int(toks[1])
                    ranks = [int(x) for x in toks[2 + m:2 + 2 * m]]
                    low = min(ranks) if ranks else None
                    if low is not None:
                        min_rank = low if min_rank is None else min(min_rank, low)
                elif toks[0] != "SQS":
                    arity = int(toks[0][1:]) if toks[0].startswith("D") and toks[0][1:].isdigit() else (
                        2 if toks[0] in ("CX", "CP", "SWAP", "RZZ") else 1)
                    for tok in toks[1:1 + arity]:
                        max_target = max(max_target, int(tok))
        except (ValueError, IndexError):
            raise CliError(f"bad optimized circuit structure near {' '.join(lines[i])!r}")
        i += 1 + count
    return max_target, min_rank


# ---------------------------------------------------------------------------
# subcommands


def _cmd_gen(args) -> int:
    circuit = generate(args.family, args.qubits, args.seed, p=args.p, secret=args.secret)
    text = serialize_raw(circuit) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_finder(args) -> int:
    n, local = args.qubit_size, args.rank_size
    if not (0 < local <= n):
        raise CliError(f"rank size {local} must lie in (0, {n}]")
    raw = parse_raw(_read_text(args.target_file), n)
    layout = LayoutParams(n=n, c=args.cache_size, r=n - local,
                          f=args.fusion_size if args.apply_fusion else 0)
    opt = optimize(raw, layout,
                   enable_ims=bool(args.apply_ims),
                   enable_xrs=bool(args.apply_xrs),
                   enable_fusion=bool(args.apply_fusion))
    sys.stdout.write(serialize_optimized(opt) + "\n")
    return 0


def _load_ini(path: str) -> LayoutParams:
    cp = configparser.ConfigParser(inline_comment_prefixes=("//", "#", ";"))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh, source=path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}")
    except configparser.Error as exc:
        raise CliError(f"bad config {path}: {exc}")
    if cp.sections() != ["system"]:
        raise CliError(f"{path}: expected exactly one [system] section")
    keys = set(cp["system"])
    want = {"total_qbit", "rank_qbit", "buffer_qbit"}
    if keys != want:
        unknown = sorted(keys - want) + sorted(want - keys)
        raise CliError(f"{path}: config keys must be exactly total_qbit, rank_qbit, "
                       f"buffer_qbit (offending: {', '.join(unknown)})")
    try:
        n = cp.getint("system", "total_qbit")
        r = cp.getint("system", "rank_qbit")
        b = cp.getint("system", "buffer_qbit")
    except ValueError as exc:
        raise CliError(f"{path}: {exc}")
    if not (0 <= r <= n):
        raise CliError(f"{path}: need 0 <= rank_qbit <= total_qbit")
    if not (0 <= b <= n - r):
        raise CliError(f"{path}: need buffer_qbit <= total_qbit - rank_qbit")
    return LayoutParams(n=n, c=n - r, r=r, cl=min(2, n - r), b=b)


def _cmd_sim(args) -> int:
    base = _load_ini(args.config)
    text = _read_text(args.circuit)
    max_target, _ = _scan_optimized(text)
    c = max_target + 1
    if c > base.local_qubits:
        raise CliError(
            f"circuit targets chunk qubit {max_target} but only {base.local_qubits} "
            f"local qubits are available with rank_qbit={base.r}")
    cl = min(2, c)
    layout = LayoutParams(n=base.n, c=c, r=base.r, cl=cl, b=base.b)
    opt = parse_optimized(text, layout)

    workers = _workers()
    import time as _time
    with Simulator(layout, workers_per_rank=workers) as sim:
        t0 = _time.perf_counter()
        res = sim.run(opt)
        wall = _time.perf_counter() - t0

    print(f"qubits {layout.n}  ranks {layout.num_ranks}  chunk_qubits {layout.c}  "
          f"cacheline_qubits {layout.cl}  buffer_qubits {layout.b}  workers {workers}")
    print(f"norm {res.norm():.12f}")
    print(f"elapsed_seconds {wall:.6f}")
    print(f"gate_seconds {res.timings['gate']:.6f}")
    print(f"ims_seconds {res.timings['ims']:.6f}")
    print(f"xrs_seconds {res.timings['xrs']:.6f}")
    print("aio_seconds 0.000000")

    k = args.amps
    if k or args.amps_file:
        k = k or (1 << layout.n)
        k = min(k, 1 << layout.n)
        if layout.n <= 24:
            vec = res.logical_vector()[:k]
            amps = [(float(v.real), float(v.imag)) for v in vec]
        else:
            amps = []
            for i in range(k):
                v = res.amplitude(i)
                amps.append((v.real, v.imag))
        if args.amps_file:
            with open(args.amps_file, "w", encoding="utf-8") as fh:
                for re_, im in amps:
                    fh.write(f"{re_!r} {im!r}\n")
        else:
            for i, (re_, im) in enumerate(amps):
                print(f"amp {i} {re_!r} {im!r}")
    return 0


def _cmd_validate(args) -> int:
    raw_text = _read_text(args.raw)
    n = args.qubits or _infer_qubits(raw_text)
    raw = parse_raw(raw_text, n)
    opt_text = _read_text(args.opt)
    _, min_rank = _scan_optimized(opt_text)
    local = min_rank if min_rank is not None else n
    layout = LayoutParams(n=n, c=local, r=n - local)
    opt = parse_optimized(opt_text, layout)
    report = validate_order(raw, opt)
    if report.ok:
        print(PASS_MESSAGE)
        return 0
    for msg in report.messages:
        print(f"mismatch: {msg}")
    return 1


def _cmd_bench(args) -> int:
    rows = run_bench(args.suite, sizes=args.sizes, qubits=args.qubits,
                     ranks=args.ranks, reps=args.reps, seed=args.seed,
                     fusion=args.fusion, workers=_workers())
    text = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.plot:
        path = plot_rows(rows, args.suite, args.plot)
        print(f"figure written to {path}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# argument wiring


def _add_finder_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("target_file", help="raw circuit file")
    p.add_argument("cache_size", type=int, help="chunk qubits C (2^C amplitudes per chunk)")
    p.add_argument("rank_size", type=int, help="local qubits per rank (N - R)")
    p.add_argument("qubit_size", type=int, help="total qubits N")
    p.add_argument("apply_ims", type=int, choices=(0, 1), help="enable in-memory swapping")
    p.add_argument("apply_xrs", type=int, choices=(0, 1), help="enable cross-rank swapping")
    p.add_argument("fusion_size", type=int, help="fusion scope qubits F")
    p.add_argument("apply_fusion", type=int, choices=(0, 1), help="enable diagonal fusion")


def _add_sim_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-i", dest="config", required=True, help=".ini configure file")
    p.add_argument("-c", dest="circuit", required=True, help="optimized circuit file")
    p.add_argument("--amps", type=int, default=0, metavar="K",
                   help="print the first K logical amplitudes")
    p.add_argument("--amps-file", default=None, metavar="PATH",
                   help="write amplitudes (re im per line) to PATH instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quokka", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a benchmark circuit")
    p.add_argument("--family", required=True, choices=ALL_FAMILIES)
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output file (stdout if omitted)")
    p.add_argument("--p", type=int, default=5, help="QAOA levels")
    p.add_argument("--secret", default=None, help="BV secret bitstring")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("finder", help="optimize a raw circuit")
    _add_finder_args(p)
    p.set_defaults(func=_cmd_finder)

    p = sub.add_parser("sim", help="simulate an optimized circuit")
    _add_sim_args(p)
    p.set_defaults(func=_cmd_sim)

    p = sub.add_parser("validate", help="validate optimized circuit order")
    p.add_argument("--raw", required=True)
    p.add_argument("--opt", required=True)
    p.add_argument("--qubits", type=int, default=None)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("bench", help="run a benchmark suite")
    p.add_argument("--suite", required=True, choices=SUITES)
    p.add_argument("--sizes", type=int, nargs="*", default=None,
                   help="qubit sizes for the qubit suite")
    p.add_argument("--qubits", type=int, default=20)
    p.add_argument("--ranks", type=int, nargs="*", default=None)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fusion", action="store_true")
    p.add_argument("--out", default=None, help="CSV file (stdout if omitted)")
    p.add_argument("--plot", default=None, metavar="PATH",
                   help="write a matplotlib figure for the suite")
    p.set_defaults(func=_cmd_bench)
    return parser


def _run(func, args) -> int:
    try:
        return func(args)
    except (CliError, ParseError, OptimizeError, SimulationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    return _run(args.func, args)


def finder_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="finder",
        description="Rewrite a raw circuit into cache-resident gate blocks "
                    "with swap instructions.")
    _add_finder_args(parser)
    args = parser.parse_args(argv)
    return _run(_cmd_finder, args)


def sim_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="Quokka", description="Simulate an optimized circuit.")
    _add_sim_args(parser)
    args = parser.parse_args(argv)
    return _run(_cmd_sim, args)


if __name__ == "__main__":
    sys.exit(main())
