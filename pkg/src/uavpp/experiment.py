"""Experiment sessions: replicate runs, session-level metrics, result files, exporters, sorting benchmark.

Layout written by :func:`cmd_run`::

    OUT/case{c}/runs/{ALGO}_rep{r:02d}.json
    OUT/case{c}/summary.json | summary.csv | summary.txt

Run records carry no timestamps, so re-running a spec reproduces them byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .evolve import VARIANTS, AlgorithmConfig, RunResult, run_algorithm
from .geometry import decode, write_path_csv
from .metrics import aggregate_replicates, compute_bounds, mean_hv
from .objectives import OBJECTIVE_NAMES, check_case, party_labels
from .ranking import fast_nds, mpnds2
from .scenario import CityScenario, from_dict, generate_default_scenario, load_scenario, to_dict

log = logging.getLogger(__name__)

RECORD_FORMAT = "uavpp-run/1"


class SpecError(ValueError):
    """Invalid experiment specification; the message starts with the offending field."""


class ExportError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    cases: tuple[int, ...] = (1,)
    algorithms: tuple[str, ...] = VARIANTS
    replicates: int = 30
    fe_budget: int = 80000
    pop_size: int = 105
    base_seed: int = 0
    scenario: str = "default"  # "default", "seed:N" or a scenario JSON path
    out_dir: str = "results"

    def validate(self) -> None:
        if not self.cases:
            raise SpecError("cases: at least one case id is required")
        for c in self.cases:
            check_case(c)
        if len(set(self.cases)) != len(self.cases):
            raise SpecError("cases: duplicate case ids would write to the same output paths")
        if not self.algorithms:
            raise SpecError("algorithms: at least one algorithm is required")
        for a in self.algorithms:
            if a not in VARIANTS:
                raise SpecError(f"algorithms: unknown algorithm {a!r}; choose from {', '.join(VARIANTS)}")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise SpecError("algorithms: duplicate names would write to the same output paths")
        if self.replicates < 1:
            raise SpecError(f"replicates: must be >= 1, got {self.replicates}")
        if self.pop_size < 2:
            raise SpecError(f"pop_size: must be >= 2, got {self.pop_size}")
        if self.fe_budget < self.pop_size:
            raise SpecError(f"fe_budget: must be >= pop_size ({self.pop_size}), got {self.fe_budget}")
        if self.scenario.startswith("seed:"):
            try:
                int(self.scenario[5:])
            except ValueError:
                raise SpecError(f"scenario: bad generator seed in {self.scenario!r}") from None

    def seed_for(self, replicate: int) -> int:
        return self.base_seed + replicate

    def config(self, algorithm: str, replicate: int) -> AlgorithmConfig:
        return AlgorithmConfig(
            algorithm, pop_size=self.pop_size, fe_budget=self.fe_budget, seed=self.seed_for(replicate)
        )

    def to_dict(self) -> dict:
        return {
            "cases": list(self.cases),
            "algorithms": list(self.algorithms),
            "replicates": self.replicates,
            "fe_budget": self.fe_budget,
            "pop_size": self.pop_size,
            "base_seed": self.base_seed,
            "scenario": self.scenario,
        }


def resolve_scenario(source: str) -> CityScenario:
    if source == "default":
        return generate_default_scenario(0)
    if source.startswith("seed:"):
        return generate_default_scenario(int(source[5:]))
    return load_scenario(source)


def scenario_digest(sc: CityScenario) -> str:
    return hashlib.sha256(json.dumps(to_dict(sc), sort_keys=True).encode()).hexdigest()


def worker_count(jobs: int) -> int:
    cap = os.environ.get("UAVPP_THREADS")
    n = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(n, jobs))


def dumps(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, allow_nan=False) + "\n"


def run_path(out_dir, case: int, algorithm: str, replicate: int) -> Path:
    return Path(out_dir) / f"case{case}" / "runs" / f"{algorithm}_rep{replicate:02d}.json"


def _job(args) -> RunResult:
    config, case, scenario = args
    return run_algorithm(config, case, scenario)


def _pop_block(pop, idx=None, genomes: bool = False) -> dict:
    p = pop if idx is None else pop.take(idx)
    out = {"eff": p.eff.tolist(), "safe": p.safe.tolist(), "violation": p.violation.tolist()}
    if genomes:
        out["genomes"] = p.genomes.tolist()
        out["raw"] = [dict(zip(OBJECTIVE_NAMES, row)) for row in p.raw.tolist()]
    return out


def build_record(result: RunResult, replicate: int, scenario: CityScenario, source: str, bounds) -> dict:
    mps = result.mps_population()
    if bounds is None:
        metric = {"hv_per_party": [0.0, 0.0], "mean_hv": 0.0, "set_size": len(mps)}
    else:
        metric = mean_hv([mps.eff, mps.safe], bounds).to_dict()
    return {
        "format": RECORD_FORMAT,
        "case": result.case,
        "algorithm": result.config.variant,
        "replicate": replicate,
        "seed": result.seed,
        "config": result.config.to_dict(),
        "evaluations": result.evaluations,
        "labels": {"eff": list(party_labels(result.case, "eff")), "safe": list(party_labels(result.case, "safe"))},
        "scenario": {"source": source, "sha256": scenario_digest(scenario), "document": to_dict(scenario)},
        "mps": _pop_block(result.final, result.mps, genomes=True),
        "final_population": _pop_block(result.final),
        "history": result.history,
        "history_bounds": result.history_bounds,
        "metrics": {**metric, "bounds": None if bounds is None else bounds.to_dict()},
    }


def summarize(case: int, spec: ExperimentSpec, values: dict, sizes: dict, bounds) -> dict:
    doc = {"case": case, "spec": spec.to_dict(), "bounds": None if bounds is None else bounds.to_dict()}
    doc["mps_size_mean"] = {a: float(np.mean(v)) for a, v in sizes.items()}
    doc["values"] = values
    if spec.replicates >= 2:
        doc["stats"] = aggregate_replicates(values).to_dict()
    else:
        log.warning("one replicate per algorithm: standard deviations and p-values are omitted")
        doc["stats"] = {
            "mean": {a: float(np.mean(v)) for a, v in values.items()},
            "std": {a: None for a in values},
            "n": {a: len(v) for a, v in values.items()},
            "p_values": [],
        }
    return doc


def summary_table(doc: dict) -> str:
    st = doc["stats"]
    algos = list(doc["values"])
    width = max(len("algorithm"), *(len(a) for a in algos))
    lines = [f"case {doc['case']}  meanHV over {doc['spec']['replicates']} replicate(s)"]
    lines.append(f"{'algorithm':<{width}}  {'mean':>10}  {'std':>10}  {'|MPS|':>7}")
    for a in algos:
        std = st["std"][a]
        std_s = "-" if std is None else f"{std:.4e}"
        lines.append(f"{a:<{width}}  {st['mean'][a]:>10.4e}  {std_s:>10}  {doc['mps_size_mean'][a]:>7.2f}")
    if st["p_values"]:
        lines.append("")
        lines.append("rank-sum p-values")
        for row in st["p_values"]:
            lines.append(f"{row['a']:<{width}} vs {row['b']:<{width}}  {row['p']:.4g}")
    return "\n".join(lines) + "\n"


def _write_summary(case_dir: Path, doc: dict) -> None:
    (case_dir / "summary.json").write_text(dumps(doc))
    with open(case_dir / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["algorithm", "n", "mean_hv", "std_hv", "mean_mps_size"])
        st = doc["stats"]
        for a in doc["values"]:
            std = st["std"][a]
            w.writerow([a, st["n"][a], repr(st["mean"][a]), "" if std is None else repr(std), repr(doc["mps_size_mean"][a])])
    (case_dir / "summary.txt").write_text(summary_table(doc))


@dataclass
class SessionResult:
    records: dict = field(default_factory=dict)  # (case, algo, rep) -> record dict
    summaries: dict = field(default_factory=dict)  # case -> summary dict


def cmd_run(spec: ExperimentSpec, write: bool = True) -> SessionResult:
    """Run every (case, algorithm, replicate), score all MPS sets against session bounds, write files."""
    spec.validate()
    scenario = resolve_scenario(spec.scenario)
    scenario.validate()
    out = Path(spec.out_dir)
    session = SessionResult()
    for case in spec.cases:
        keys = [(a, r) for a in spec.algorithms for r in range(spec.replicates)]
        jobs = [(spec.config(a, r), case, scenario) for a, r in keys]
        workers = worker_count(len(jobs))
        t0 = time.perf_counter()
        if workers == 1:
            results = [_job(j) for j in jobs]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_job, jobs))
        log.info("case %d: %d runs in %.1fs on %d worker(s)", case, len(jobs), time.perf_counter() - t0, workers)

        sets = [(res.mps_population().eff, res.mps_population().safe) for res in results if len(res.mps)]
        bounds = compute_bounds(sets) if sets else None
        if bounds is None:
            log.warning("case %d: every MPS is empty; all meanHV values are 0", case)
        values = {a: [] for a in spec.algorithms}
        sizes = {a: [] for a in spec.algorithms}
        for (a, r), res in zip(keys, results):
            rec = build_record(res, r, scenario, spec.scenario, bounds)
            session.records[(case, a, r)] = rec
            values[a].append(rec["metrics"]["mean_hv"])
            sizes[a].append(len(res.mps))
        doc = summarize(case, spec, values, sizes, bounds)
        session.summaries[case] = doc
        if write:
            case_dir = out / f"case{case}"
            (case_dir / "runs").mkdir(parents=True, exist_ok=True)
            for (a, r) in keys:
                run_path(out, case, a, r).write_text(dumps(session.records[(case, a, r)]))
            _write_summary(case_dir, doc)
    return session


# ---------------------------------------------------------------------------
# exporters
# ---------------------------------------------------------------------------


def load_record(path) -> dict:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != RECORD_FORMAT:
        raise ExportError(f"{path}: not a run record")
    return doc


def cmd_export_front(run_file, party: str, out=None, population: bool = False) -> Path:
    """CSV of one party's objective pairs for the MPS (and optionally the whole final population)."""
    if party not in ("eff", "safe"):
        raise ExportError(f"party must be 'eff' or 'safe', got {party!r}")
    rec = load_record(run_file)
    cols = rec["labels"][party]
    out = Path(out) if out else Path(run_file).with_name(Path(run_file).stem + f"_front_{party}.csv")
    rows = [("mps", v) for v in rec["mps"][party]]
    if not rows:
        log.warning("%s: MPS is empty; writing header only", run_file)
    if population:
        rows += [("population", v) for v in rec["final_population"][party]]
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["set", *cols] if population else cols)
        for tag, v in rows:
            vals = [repr(float(x)) for x in v]
            w.writerow([tag, *vals] if population else vals)
    return out


def cmd_export_path(run_file, index: int, out=None) -> tuple[Path, Path]:
    """Waypoint CSV of one MPS member plus a JSON sidecar holding its seven raw objectives."""
    rec = load_record(run_file)
    n = len(rec["mps"]["genomes"])
    if not 0 <= index < n:
        valid = "MPS is empty" if n == 0 else f"valid range is 0..{n - 1}"
        raise ExportError(f"index {index} out of range: {valid}")
    scenario = from_dict(rec["scenario"]["document"])
    points = decode(np.asarray(rec["mps"]["genomes"][index]), scenario)
    out = Path(out) if out else Path(run_file).with_name(Path(run_file).stem + f"_path{index}.csv")
    write_path_csv(points, out)
    side = out.with_suffix(".objectives.json")
    side.write_text(dumps({"case": rec["case"], "index": index, "raw": rec["mps"]["raw"][index]}))
    return out, side


# ---------------------------------------------------------------------------
# sorting benchmark
# ---------------------------------------------------------------------------


def _median_time(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def bench_sort(n_list, m_list, k_list, repeats: int = 7, seed: int = 0) -> list[dict]:
    """Median time of mpnds2 over K parties of m objectives against one fast_nds over m objectives."""
    if not (n_list and m_list and k_list):
        raise SpecError("bench: n, m and K lists must be nonempty")
    rng = np.random.default_rng(seed)
    rows = []
    for n in n_list:
        for m in m_list:
            base = rng.random((n, m))
            fast_nds(base)  # compile / warm caches
            t_nds = _median_time(lambda: fast_nds(base), repeats)
            for k in k_list:
                parties = [rng.random((n, m)) for _ in range(k)]
                mpnds2(parties)
                t_mp = _median_time(lambda: mpnds2(parties), repeats)
                rows.append({"n": n, "m": m, "K": k, "t_mpnds2": t_mp, "t_fast_nds": t_nds, "ratio": t_mp / t_nds})
    return rows


def bench_table(rows: list[dict]) -> str:
    lines = [f"{'n':>6} {'m':>3} {'K':>3} {'mpnds2 [ms]':>12} {'fast_nds [ms]':>14} {'ratio':>7}"]
    for r in rows:
        lines.append(
            f"{r['n']:>6} {r['m']:>3} {r['K']:>3} {1e3 * r['t_mpnds2']:>12.3f} {1e3 * r['t_fast_nds']:>14.3f} {r['ratio']:>7.2f}"
        )
    return "\n".join(lines) + "\n"


def recompute_summary(case_dir) -> dict:
    """Rebuild the per-algorithm meanHV lists from the run records of one case directory."""
    values: dict[str, list[tuple[int, float]]] = {}
    for f in sorted(Path(case_dir, "runs").glob("*.json")):
        rec = load_record(f)
        values.setdefault(rec["algorithm"], []).append((rec["replicate"], rec["metrics"]["mean_hv"]))
    return {a: [v for _, v in sorted(vs)] for a, vs in values.items()}

