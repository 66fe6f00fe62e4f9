"""Command line harness: ``gen``, ``run`` and ``report``.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .experiment import ExperimentConfig, gen_maxcut, gen_nae3sat, run_experiment
from .records import SchemaError
from .report import build_report

log = logging.getLogger("dapo_qaoa")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=default(0), help="master seed")
    parser.add_argument("--out", default=default(None), help="output directory")
    parser.add_argument("--threads", type=int, default=default(1), help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dapo-qaoa", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate instance files with oracle manifests")
    gen_sub = gen.add_subparsers(dest="problem", required=True, parser_class=_Parser)
    mc = gen_sub.add_parser("maxcut")
    _global_flags(mc, suppress=True)
    mc.add_argument("--n", type=int, required=True)
    mc.add_argument("--m", type=int)
    mc.add_argument("--complete", action="store_true", help="complete graph K_n")
    mc.add_argument("--target-opt", type=float,
                    help="retry derived seeds until the exact optimum equals this value")
    sat = gen_sub.add_parser("nae3sat")
    _global_flags(sat, suppress=True)
    sat.add_argument("--vars", type=int, required=True)
    sat.add_argument("--clauses", type=int, required=True)

    run = sub.add_parser("run", help="run algorithm sweeps and write records.csv")
    _global_flags(run, suppress=True)
    run.add_argument("--config", type=Path, help="JSON file mirroring ExperimentConfig")
    run.add_argument("--problem", choices=("maxcut", "nae3sat"))
    run.add_argument("--instance", action="append", default=[], help="instance file (repeatable)")
    run.add_argument("--algorithms", help="comma separated, e.g. dapo,vanilla")
    run.add_argument("--p-min", type=int)
    run.add_argument("--p-max", type=int)
    run.add_argument("--max-evals", type=int)
    run.add_argument("--epsilon", type=float)

    rep = sub.add_parser("report", help="render SVG charts and summary.txt from records")
    _global_flags(rep, suppress=True)
    rep.add_argument("records", nargs="+", type=Path)
    return parser


def _run_config(args) -> ExperimentConfig:
    data = {}
    if args.config:
        data = json.loads(args.config.read_text(encoding="utf-8"))
    if args.problem:
        data["problem"] = args.problem
    if args.instance:
        data["instances"] = args.instance
    if args.algorithms:
        data["algorithms"] = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    if args.p_min is not None:
        data["p_min"] = args.p_min
    if args.p_max is not None:
        data["p_max"] = args.p_max
    if args.epsilon is not None:
        data["epsilon"] = args.epsilon
    if args.max_evals is not None:
        data.setdefault("optimizer", {})["max_evals"] = args.max_evals
    if "seed" in vars(args) and (args.seed != 0 or "seed" not in data):
        data["seed"] = args.seed
    if args.out:
        data["out"] = args.out
    data["threads"] = args.threads if args.threads != 1 else data.get("threads", 1)
    if "problem" not in data:
        raise UsageError("--problem or a config file with 'problem' is required")
    try:
        return ExperimentConfig(**data)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    out = Path(args.out) if args.out else Path(".")
    try:
        if args.command == "gen":
            if args.problem == "maxcut":
                if not args.complete and args.m is None:
                    raise UsageError("gen maxcut needs --m or --complete")
                if args.m is not None and args.m > args.n * (args.n - 1) // 2:
                    raise UsageError(f"--m {args.m} exceeds n(n-1)/2 = {args.n * (args.n - 1) // 2}")
                path = gen_maxcut(out, args.n, args.m, args.seed, args.complete, args.target_opt)
            else:
                if args.vars < 3:
                    raise UsageError("--vars must be >= 3")
                path = gen_nae3sat(out, args.vars, args.clauses, args.seed)
            log.info("wrote %s and %s", path, path.with_suffix(".json"))
        elif args.command == "run":
            cfg = _run_config(args)
            path = run_experiment(cfg)
            log.info("wrote %s", path)
        else:
            for path in build_report(args.records, out):
                log.info("wrote %s", path)
    except UsageError as exc:
        print(f"dapo-qaoa: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, RuntimeError, ArithmeticError, SchemaError) as exc:
        print(f"dapo-qaoa: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
