"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 file-system or parse failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import experiment as ex
from .evolve import VARIANTS, ConfigError
from .objectives import CaseError
from .scenario import ScenarioParseError, ScenarioValidationError, generate_default_scenario, save_scenario

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2
DESK_FE, DESK_REPLICATES = 20000, 10

log = logging.getLogger("uavpp")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _algo_list(text: str) -> list[str]:
    if text.strip().lower() == "all":
        return list(VARIANTS)
    names = {v.lower(): v for v in VARIANTS}
    out = []
    for t in text.split(","):
        key = t.strip().lower()
        if key not in names:
            raise argparse.ArgumentTypeError(f"unknown algorithm {t.strip()!r}; choose from {', '.join(VARIANTS)}")
        out.append(names[key])
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="uavpp", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run an experiment session")
    r.add_argument("--cases", type=_int_list, default=[1])
    r.add_argument("--algos", type=_algo_list, default=list(VARIANTS), help="comma list or 'all'")
    r.add_argument("--replicates", type=int, default=None, help="default 30 (10 with --desk)")
    r.add_argument("--fe", type=int, default=None, help="evaluation budget, default 80000 (20000 with --desk)")
    r.add_argument("--pop", type=int, default=105)
    r.add_argument("--seed", type=int, default=0, help="replicate r runs with seed + r")
    r.add_argument("--scenario", default="default", help="'default', 'seed:N' or a scenario JSON file")
    r.add_argument("--out", default="results")
    r.add_argument("--desk", action="store_true", help="reduced preset: 20000 evaluations, 10 replicates")

    f = sub.add_parser("export-front", help="CSV of one party's objectives for a run's MPS")
    f.add_argument("--run", required=True)
    f.add_argument("--party", choices=("eff", "safe"), required=True)
    f.add_argument("--population", action="store_true", help="append the full final population")
    f.add_argument("--out")

    w = sub.add_parser("export-path", help="waypoint CSV of one MPS member")
    w.add_argument("--run", required=True)
    w.add_argument("--index", type=int, required=True)
    w.add_argument("--out")

    b = sub.add_parser("bench-sort", help="time mpnds2 against a single nondominated sort")
    b.add_argument("--n", type=_int_list, default=[50, 105, 200])
    b.add_argument("--m", type=_int_list, default=[4])
    b.add_argument("--k", type=_int_list, default=[1, 2, 4])
    b.add_argument("--repeats", type=int, default=7)
    b.add_argument("--json", dest="json_out", help="also write rows as JSON")

    s = sub.add_parser("scenario", help="write a generated scenario to JSON")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    return p


def _cmd_run(args) -> int:
    fe = args.fe if args.fe is not None else (DESK_FE if args.desk else 80000)
    reps = args.replicates if args.replicates is not None else (DESK_REPLICATES if args.desk else 30)
    spec = ex.ExperimentSpec(
        cases=tuple(args.cases),
        algorithms=tuple(args.algos),
        replicates=reps,
        fe_budget=fe,
        pop_size=args.pop,
        base_seed=args.seed,
        scenario=args.scenario,
        out_dir=args.out,
    )
    session = ex.cmd_run(spec)
    for doc in session.summaries.values():
        print(ex.summary_table(doc))
    return EXIT_OK


def _cmd_export_front(args) -> int:
    print(ex.cmd_export_front(args.run, args.party, args.out, args.population))
    return EXIT_OK


def _cmd_export_path(args) -> int:
    csv_path, side = ex.cmd_export_path(args.run, args.index, args.out)
    print(csv_path)
    print(side)
    return EXIT_OK


def _cmd_bench(args) -> int:
    rows = ex.bench_sort(args.n, args.m, args.k, args.repeats)
    print(ex.bench_table(rows), end="")
    if args.json_out:
        with open(args.json_out, "w") as fh:
            json.dump(rows, fh, indent=1)
    return EXIT_OK


def _cmd_scenario(args) -> int:
    save_scenario(generate_default_scenario(args.seed), args.out)
    print(args.out)
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "export-front": _cmd_export_front,
    "export-path": _cmd_export_path,
    "bench-sort": _cmd_bench,
    "scenario": _cmd_scenario,
}

VALIDATION_ERRORS = (
    UsageError,
    ex.SpecError,
    ex.ExportError,
    CaseError,
    ConfigError,
    ScenarioValidationError,
)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_VALIDATION
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ScenarioParseError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
