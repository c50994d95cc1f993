"""Command-line entry point: ``analyze``, ``simulate`` and ``sweep``.

Exit codes: 0 success, 1 theorem/eigenvalue disagreement under ``--strict``,
2 usage or parameter error, 3 divergence during simulation.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager

import numpy as np

from . import __version__
from .errors import ConfigError, DomainError, ParameterError
from .integrator import convergence_report, simulate
from .reporting import (
    analyze_point,
    fmt,
    load_run_config,
    sweep_point,
    write_report,
    write_trajectory,
)

EXIT_OK = 0
EXIT_DISAGREE = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3


class UsageError(Exception):
    pass


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="emit machine-readable single-line records")
    parser.add_argument("--strict", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="abort when the case table and the eigenvalue test disagree")
    parser.add_argument("--out", metavar="PATH", default=default, help="write the CSV output to PATH")


def _point_flags(parser: argparse.ArgumentParser, m_default=None, q_default=None) -> None:
    parser.add_argument("-a", type=float, required=True)
    parser.add_argument("-c", type=float, required=True)
    parser.add_argument("-k", type=float, required=True)
    parser.add_argument("-m", type=float, default=m_default, required=m_default is None,
                        help="equilibrium (0, m, 0); 0 selects the origin")
    parser.add_argument("-q", type=float, default=q_default, required=q_default is None,
                        help="fractional order in (0, 1]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracchenlee",
        description="Stability analysis and simulation of the special fractional Chen-Lee system.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify one equilibrium of the controlled system")
    _global_flags(p, suppress=True)
    _point_flags(p)
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("simulate", help="integrate with the fractional Euler scheme")
    _global_flags(p, suppress=True)
    p.add_argument("config", help="key = value run configuration file")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("sweep", help="tabulate stability over a parameter grid")
    _global_flags(p, suppress=True)
    p.add_argument("--vary", choices=("q", "m", "k"), required=True)
    p.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"), required=True)
    p.add_argument("--steps", type=int, required=True, help="number of grid points")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("-a", type=float, required=True)
    p.add_argument("-c", type=float, required=True)
    p.add_argument("-k", type=float, default=None)
    p.add_argument("-m", type=float, default=None)
    p.add_argument("-q", type=float, default=None)
    p.set_defaults(handler=cmd_sweep)
    return parser


@contextmanager
def _output(path, fallback):
    if path is None:
        yield fallback
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _human(value) -> str:
    # shortest round-trip text for terminals; CSV output keeps 17 digits
    return repr(float(value)) if isinstance(value, float) else fmt(value)


def _disagreement(row) -> str:
    return (
        f"case table says {row.theorem_verdict} ({row.clause}) but eigenvalue test says "
        f"{row.verdict} at a={fmt(row.a)} c={fmt(row.c)} k={fmt(row.k)} m={fmt(row.m)} q={fmt(row.q)}"
    )


def cmd_analyze(args) -> int:
    try:
        row = analyze_point(args.a, args.c, args.k, args.m, args.q)
    except (ParameterError, DomainError) as exc:
        raise UsageError(str(exc)) from exc
    if args.strict and not row.agree:
        print(f"error: {_disagreement(row)}", file=sys.stderr)
        return EXIT_DISAGREE
    record = row.as_record()
    if args.json:
        print(json.dumps(record))
    else:
        width = max(map(len, record))
        for key, value in record.items():
            print(f"{key:<{width}}  {_human(value)}")
    if args.out:
        with _output(args.out, None) as fh:
            write_report([row], fh)
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        run = load_run_config(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    except (ConfigError, ParameterError, DomainError) as exc:
        raise UsageError(f"config error: {exc}") from exc

    traj = simulate(run.integrator, run.system, run.x_e)
    with _output(args.out, sys.stdout) as fh:
        write_trajectory(traj, run.x_e, fh)

    report = convergence_report(traj, run.x_e)
    summary = {
        "rows": len(traj),
        "initial_dist": report.initial,
        "terminal_dist": report.terminal,
        "min_dist": report.minimum,
        "tail_nonincreasing": report.tail_nonincreasing,
        "diverged": traj.diverged,
    }
    stream = sys.stdout if args.out else sys.stderr
    if args.json:
        print(json.dumps(summary), file=stream)
    else:
        for key, value in summary.items():
            print(f"{key:<18}  {_human(value)}", file=stream)
    return EXIT_DIVERGED if traj.diverged else EXIT_OK


def cmd_sweep(args) -> int:
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    lo, hi = args.range
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
        raise UsageError(f"invalid range {lo}..{hi}")
    if args.vary == "q" and not (0.0 < lo and hi <= 1.0):
        raise UsageError("q range must lie inside (0, 1]")
    fixed = {"k": args.k, "m": args.m, "q": args.q}
    for name, value in fixed.items():
        if name != args.vary and value is None:
            raise UsageError(f"-{name} is required when sweeping {args.vary}")
    if args.vary != "q" and not (0.0 < args.q <= 1.0):
        raise UsageError("q must lie in (0, 1]")

    grid = np.linspace(lo, hi, args.steps) if args.steps > 1 else np.array([lo])
    points = []
    for value in grid:
        point = dict(fixed, **{args.vary: float(value)})
        points.append((args.a, args.c, point["k"], point["m"], point["q"]))

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(sweep_point, points, chunksize=max(1, len(points) // (4 * args.jobs))))
    else:
        rows = [sweep_point(p) for p in points]

    if args.strict:
        bad = [r for r in rows if r.valid and not r.agree]
        if bad:
            for row in bad:
                print(f"error: {_disagreement(row)}", file=sys.stderr)
            return EXIT_DISAGREE

    if args.json:
        with _output(args.out, sys.stdout) as fh:
            for row in rows:
                fh.write(json.dumps(row.as_record()) + "\n")
    else:
        with _output(args.out, sys.stdout) as fh:
            write_report(rows, fh)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
