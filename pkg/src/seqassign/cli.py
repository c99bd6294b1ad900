"""Command-line interface: every capability behind one ``assign`` executable.

Each subcommand validates its numeric flags before touching any input file
or starting any computation, writes CSV to stdout or ``--out``, and maps
failures to exit codes: 2 for usage problems (argparse), 1 for computation
errors, with a single-line ``Code: message`` diagnostic on stderr.  Output
is byte-identical for identical argv + input files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import (
    continuity_audit,
    convergence_csv,
    convergence_study,
    rate_csv,
    rate_table,
)
from .distribution import asymptotic_profile, load_distribution
from .errors import SeqAssignError, UnsortedRewardsError
from .oracle import oracle_agreement
from .policy_engine import build_table, locations, locations_csv, remaining_value, thresholds_csv
from .simulator import PolicySpec, make_rewards, monte_carlo, report_csv


def _int_at_least(minimum: int):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value

    return parse


def _seed(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")


def _n_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    if not values or values[0] < 1 or any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError("horizons must be strictly increasing and >= 1")
    return values


def _port(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 1 <= value <= 65535:
        raise argparse.ArgumentTypeError(f"port must be in 1..65535, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="assign",
        description="Optimal sequential assignment: threshold tables, asymptotics, "
        "simulation, brute-force checks, and a live game service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, dist: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        if dist:
            p.add_argument("--dist", required=True, metavar="PATH", help="distribution JSON file")
        p.add_argument("--out", default="-", metavar="PATH", help="output file, '-' for stdout")
        return p

    add("profile", "closed-form asymptotic slot fractions d_i, CSV i,d")

    p = add("thresholds", "threshold breakpoints for one horizon, CSV n,a")
    p.add_argument("--n", required=True, type=_int_at_least(1), help="horizon (slots remaining)")

    p = add("locations", "optimal slot rank per support value, CSV i,x_i,ell")
    p.add_argument("--n", required=True, type=_int_at_least(1), help="horizon (slots remaining)")

    p = add("converge", "scaled locations vs the d_i profile, CSV N,i,ell,ell_over_N,d,gap")
    p.add_argument("--n", required=True, type=_n_list, metavar="A,B,C", help="horizons to record")

    p = add("rates", "tail rate functions for one interior support index, CSV y,rate_minus,rate_plus")
    p.add_argument("--i", required=True, type=_int_at_least(2), help="interior support index (2..k-1)")
    p.add_argument("--grid", default=101, type=_int_at_least(2), help="grid points across (f_{i-1}, f_i)")

    p = add("simulate", "Monte Carlo game totals under a policy, CSV report")
    p.add_argument("--n", type=_int_at_least(1), help="board size (required with reward presets)")
    p.add_argument("--rewards", default="linear", help="linear, geometric:B, or JSON array file")
    p.add_argument("--policy", default="optimal", choices=("optimal", "dprofile", "random"))
    p.add_argument("--trials", default=10000, type=_int_at_least(2))
    p.add_argument("--seed", default=0, type=_seed)

    p = add("oracle", "brute-force vs engine value agreement, CSV oracle,engine,rel_gap")
    p.add_argument("--n", type=_int_at_least(1), help="slot count (required with reward presets)")
    p.add_argument("--rewards", default="linear", help="linear, geometric:B, or JSON array file")

    p = add("audit", "location increments outside {0,+1} as the horizon grows, CSV N,i,delta")
    p.add_argument("--n", required=True, type=_int_at_least(2), help="largest horizon to audit")

    p = sub.add_parser("serve", help="run the HTTP game-advisor service")
    p.add_argument("--port", default=8000, type=_port)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--journal", metavar="PATH", help="append-only JSONL journal for restart recovery")
    p.add_argument("--static", metavar="DIR", help="static web UI bundle to serve under /")
    return parser


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _resolve_rewards(parser: argparse.ArgumentParser, spec: str, n: int | None) -> tuple[float, ...]:
    """Presets need --n; a JSON array file fixes the size itself."""
    if spec == "linear" or spec.startswith("geometric:"):
        if n is None:
            parser.error(f"--rewards {spec} requires --n")
        return make_rewards(spec, n)
    try:
        data = json.loads(Path(spec).read_text())
    except OSError as exc:
        raise UnsortedRewardsError(f"cannot read rewards file {spec!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UnsortedRewardsError(f"{spec}: not valid JSON ({exc})") from exc
    if not isinstance(data, list) or not all(isinstance(r, (int, float)) for r in data):
        raise UnsortedRewardsError(f"{spec}: expected a JSON array of numbers")
    if n is not None and n != len(data):
        parser.error(f"--n {n} does not match {len(data)} rewards in {spec}")
    return tuple(float(r) for r in data)


_POLICY_FLAGS = {"optimal": "optimal", "dprofile": "dprofile", "random": "uniform_random"}


def _run(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    cmd = args.command
    if cmd == "serve":
        import uvicorn

        from .service import create_app

        app = create_app(journal_path=args.journal, static_dir=args.static)
        uvicorn.run(app, host=args.host, port=args.port, log_level="info")
        return

    if cmd in ("simulate", "oracle"):
        rewards = _resolve_rewards(parser, args.rewards, args.n)
    dist = load_distribution(args.dist)

    if cmd == "profile":
        prof = asymptotic_profile(dist)
        text = "i,d\n" + "".join(f"{i},{d!r}\n" for i, d in enumerate(prof.d, start=1))
    elif cmd == "thresholds":
        table = build_table(dist, args.n, retention="last")
        text = thresholds_csv(table.row(args.n))
    elif cmd == "locations":
        text = locations_csv(dist, locations(dist, args.n))
    elif cmd == "converge":
        text = convergence_csv(convergence_study(dist, args.n))
    elif cmd == "rates":
        f_lo, f_hi = dist.cum[args.i - 1], dist.cum[args.i]
        grid = [float(y) for y in np.linspace(f_lo, f_hi, args.grid)]
        text = rate_csv(rate_table(dist, args.i, grid))
    elif cmd == "simulate":
        spec = (
            PolicySpec.dprofile(dist)
            if args.policy == "dprofile"
            else PolicySpec(_POLICY_FLAGS[args.policy])
        )
        stats = monte_carlo(dist, rewards, spec, args.trials, args.seed)
        target = remaining_value(dist, rewards) if args.policy == "optimal" else None
        text = report_csv(spec.kind, stats, target)
    elif cmd == "oracle":
        ag = oracle_agreement(dist, rewards)
        text = (
            "oracle,engine,rel_gap\n"
            f"{ag.oracle!r},{ag.engine!r},{ag.rel_gap!r}\n"
        )
    elif cmd == "audit":
        rows = continuity_audit(dist, args.n)
        text = "N,i,delta\n" + "".join(f"{n},{i},{delta}\n" for n, i, delta in rows)
    else:  # pragma: no cover - argparse enforces the choices
        parser.error(f"unknown command {cmd!r}")
    _emit(text, args.out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _run(parser, args)
    except SeqAssignError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"IOError: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
