"""Clonal-selection framework, generational GA loop, and the six algorithm variants.

Immune variants (BPNNIA, BPHEIA, BPAIMA) follow: activate the best ``nA``
individuals under MPNDS2, allocate clones by layer and crowding, vary the
clones, evaluate, merge and truncate back to ``nC``.  The NSGA-II family
(NSGA2, OPTMPNDS, OPTMPNDS2) uses binary tournament + SBX + PM and differs
only in the sorter used for survival.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import operators as ops
from .geometry import N_GENES, bounds
from .metrics import compute_bounds, mean_hv
from .objectives import BatchEvaluation, BipartyEvaluation, check_case, evaluate_batch
from .ranking import SORTERS, RankedPopulation, extract_mps
from .scenario import CityScenario

VARIANTS = ("NSGA2", "OPTMPNDS", "OPTMPNDS2", "BPNNIA", "BPHEIA", "BPAIMA")
IMMUNE = {"BPNNIA", "BPHEIA", "BPAIMA"}
SORTER_OF = {
    "NSGA2": "nds",
    "OPTMPNDS": "optmpnds",
    "OPTMPNDS2": "mpnds2",
    "BPNNIA": "mpnds2",
    "BPHEIA": "mpnds2",
    "BPAIMA": "mpnds2",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AlgorithmConfig:
    variant: str
    pop_size: int = 105
    n_active: int = 20
    fe_budget: int = 80000
    seed: int = 0
    dis_c: float = 20.0
    dis_m: float = 20.0
    p_c: float = 1.0
    p_m: float | None = None  # None -> 1 / number of genes
    de_params: dict = field(default_factory=lambda: dict(ops.DEFAULT_DE_PARAMS))
    heia_sbx_probability: float = 0.5
    adaptive_window: int = 5

    def validate(self) -> None:
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.pop_size < 2:
            raise ConfigError("pop_size must be >= 2")
        if not 1 <= self.n_active <= self.pop_size:
            raise ConfigError("n_active must lie in [1, pop_size]")
        if self.fe_budget < self.pop_size:
            raise ConfigError("fe_budget must be >= pop_size")
        probs = [self.p_c, self.heia_sbx_probability] + ([] if self.p_m is None else [self.p_m])
        probs += [cr for cr, _ in self.de_params.values()]
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ConfigError("probabilities must lie in [0, 1]")
        if self.dis_c <= 0 or self.dis_m <= 0:
            raise ConfigError("distribution indices must be positive")
        if self.adaptive_window < 1:
            raise ConfigError("adaptive_window must be >= 1")

    def mutation_rate(self) -> float:
        return 1.0 / N_GENES if self.p_m is None else self.p_m

    def to_dict(self) -> dict:
        d = asdict(self)
        d["de_params"] = {k: list(v) for k, v in sorted(self.de_params.items())}
        return d


@dataclass
class Population:
    genomes: np.ndarray
    eff: np.ndarray
    safe: np.ndarray
    violation: np.ndarray
    raw: np.ndarray

    @classmethod
    def from_eval(cls, genomes, ev: BatchEvaluation) -> "Population":
        return cls(np.asarray(genomes), ev.eff, ev.safe, ev.violation, ev.raw)

    def __len__(self):
        return len(self.genomes)

    @property
    def parties(self):
        return [self.eff, self.safe]

    def take(self, idx) -> "Population":
        return Population(self.genomes[idx], self.eff[idx], self.safe[idx], self.violation[idx], self.raw[idx])

    def concat(self, other: "Population") -> "Population":
        return Population(
            np.vstack([self.genomes, other.genomes]),
            np.vstack([self.eff, other.eff]),
            np.vstack([self.safe, other.safe]),
            np.concatenate([self.violation, other.violation]),
            np.vstack([self.raw, other.raw]),
        )


@dataclass
class Individual:
    genome: np.ndarray
    evaluation: BipartyEvaluation


@dataclass
class RunResult:
    config: AlgorithmConfig
    case: int
    final: Population
    mps: np.ndarray  # indices into ``final``
    history: list[dict]
    history_bounds: dict | None
    evaluations: int

    @property
    def seed(self) -> int:
        return self.config.seed

    def mps_population(self) -> Population:
        return self.final.take(self.mps)

    def mps_individuals(self) -> list[Individual]:
        ev = BatchEvaluation(self.final.eff, self.final.safe, self.final.violation, self.final.raw)
        return [Individual(self.final.genomes[i].copy(), ev.row(i)) for i in self.mps]


# ---------------------------------------------------------------------------
# framework steps
# ---------------------------------------------------------------------------


def activate(ranked: RankedPopulation, n_active: int) -> np.ndarray:
    """Indices of the ``n_active`` best individuals (layer, then crowding, then index)."""
    return ranked.order()[:n_active]


def clone_allocate(layers, crowding, n_clones: int) -> np.ndarray:
    """Clone counts from layer-based convergence and crowding.

    Infinite crowding is capped at twice the largest finite value (1.0 when no
    positive finite value exists).
    """
    layers = np.asarray(layers, dtype=np.float64)
    cd = np.asarray(crowding, dtype=np.float64).copy()
    finite = np.isfinite(cd)
    top = cd[finite].max() if finite.any() else 0.0
    cd[~finite] = 2.0 * top if top > 0 else 1.0
    conv = layers.max() - layers
    w = cd + conv
    total = w.sum()
    if total <= 0:
        return np.full(len(w), math.ceil(n_clones / len(w)), dtype=np.int64)
    share = n_clones * w / total
    return np.ceil(np.round(share, 9)).astype(np.int64)


def environmental_selection(pop: Population, capacity: int, sorter: str) -> np.ndarray:
    """Fill layer by layer; the split layer is truncated by crowding (desc), index (asc)."""
    n = len(pop)
    if n <= capacity:
        return np.arange(n)
    ranked = SORTERS[sorter](pop.parties, pop.violation)
    return ranked.order()[:capacity]


def _tournament(ranked: RankedPopulation, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(ranked)
    pairs = rng.integers(n, size=(k, 2))
    a, b = pairs[:, 0], pairs[:, 1]
    la, lb_ = ranked.layer[a], ranked.layer[b]
    ca, cb = ranked.crowding[a], ranked.crowding[b]
    a_wins = (la < lb_) | ((la == lb_) & ((ca > cb) | ((ca == cb) & (a <= b))))
    return np.where(a_wins, a, b)


class _Runner:
    def __init__(self, config: AlgorithmConfig, case: int, scenario: CityScenario, record_history: bool = True):
        config.validate()
        self.cfg = config
        self.case = check_case(case)
        self.scenario = scenario
        self.lb, self.ub = bounds(scenario)
        self.rng = np.random.default_rng(config.seed)
        self.sorter = SORTER_OF[config.variant]
        self.evals = 0
        self.record = record_history
        self.snapshots: list[tuple[int, int, np.ndarray, np.ndarray]] = []
        self.stats = ops.StrategyStats(window=config.adaptive_window)

    def evaluate(self, genomes) -> Population:
        self.evals += len(genomes)
        if self.evals > self.cfg.fe_budget:
            raise AssertionError("evaluation budget exceeded")
        return Population.from_eval(genomes, evaluate_batch(self.case, genomes, self.scenario))

    def snapshot(self, gen: int, pop: Population) -> None:
        if not self.record:
            return
        idx = extract_mps(pop.parties, pop.violation)
        self.snapshots.append((gen, self.evals, pop.eff[idx].copy(), pop.safe[idx].copy()))

    def mutate(self, genomes):
        return ops.polynomial_mutation(genomes, self.cfg.dis_m, self.cfg.mutation_rate(), self.lb, self.ub, self.rng)

    # -- immune generation ---------------------------------------------------

    def immune_offspring(self, pop: Population):
        cfg, rng = self.cfg, self.rng
        ranked = SORTERS["mpnds2"](pop.parties, pop.violation)
        act = activate(ranked, cfg.n_active)
        counts = clone_allocate(ranked.layer[act], ranked.crowding[act], cfg.pop_size)
        owner = np.repeat(np.arange(len(act)), counts)
        owner = owner[: self.cfg.fe_budget - self.evals]
        A = pop.genomes[act]
        C = A[owner]
        n = len(C)
        labels = np.full(n, "SBX", dtype=object)
        if cfg.variant == "BPNNIA":
            off = self._sbx_with_partner(C, owner, A)
        elif cfg.variant == "BPHEIA":
            use_sbx = rng.random(n) < cfg.heia_sbx_probability
            off = np.where(
                use_sbx[:, None],
                self._sbx_with_partner(C, owner, A),
                ops.de_variants(C, A, "DE2", rng, self.lb, self.ub, cfg.de_params),
            )
            labels[~use_sbx] = "DE2"
        else:
            labels = ops.adaptive_de_select(self.stats, rng, size=n)
            off = ops.de_variants(C, A, labels, rng, self.lb, self.ub, cfg.de_params)
        return self.mutate(off), labels

    def _sbx_with_partner(self, C, owner, A):
        nA = len(A)
        if nA > 1:
            r = self.rng.integers(nA - 1, size=len(C))
            partner = r + (r >= owner)
        else:
            partner = np.zeros(len(C), dtype=np.int64)
        return ops.sbx(C, A[partner], self.cfg.dis_c, self.cfg.p_c, self.rng, self.lb, self.ub)

    # -- generational GA -----------------------------------------------------

    def ga_offspring(self, pop: Population):
        cfg, rng = self.cfg, self.rng
        ranked = SORTERS[self.sorter](pop.parties, pop.violation)
        n_pairs = (cfg.pop_size + 1) // 2
        parents = _tournament(ranked, 2 * n_pairs, rng)
        p1, p2 = pop.genomes[parents[0::2]], pop.genomes[parents[1::2]]
        c1, c2 = ops.sbx_pair(p1, p2, cfg.dis_c, cfg.p_c, rng, self.lb, self.ub)
        off = np.empty((2 * n_pairs, p1.shape[1]))
        off[0::2], off[1::2] = c1, c2
        off = off[: min(cfg.pop_size, cfg.fe_budget - self.evals)]
        return self.mutate(off), None

    # -- main loop -----------------------------------------------------------

    def run(self) -> RunResult:
        cfg = self.cfg
        pop = self.evaluate(ops.initialize(cfg.pop_size, self.lb, self.ub, self.rng))
        gen = 0
        self.snapshot(gen, pop)
        immune = cfg.variant in IMMUNE
        while self.evals < cfg.fe_budget:
            gen += 1
            genomes, labels = self.immune_offspring(pop) if immune else self.ga_offspring(pop)
            off = self.evaluate(genomes)
            merged = pop.concat(off)
            keep = environmental_selection(merged, cfg.pop_size, self.sorter)
            if cfg.variant == "BPAIMA":
                survived = np.zeros(len(merged), dtype=bool)
                survived[keep] = True
                survived = survived[len(pop) :]
                uses = [np.sum(labels == v) for v in ops.DE_VARIANTS]
                succ = [np.sum(survived & (labels == v)) for v in ops.DE_VARIANTS]
                self.stats.record(uses, succ)
            pop = merged.take(np.sort(keep))
            self.snapshot(gen, pop)
        mps = extract_mps(pop.parties, pop.violation)
        history, hb = self._history()
        return RunResult(cfg, self.case, pop, mps, history, hb, self.evals)

    def _history(self):
        if not self.record:
            return [], None
        sets = [(e, s) for _, _, e, s in self.snapshots if len(e)]
        hb = compute_bounds(sets) if sets else None
        history = []
        for gen, evals, e, s in self.snapshots:
            mhv = mean_hv([e, s], hb).mean_hv if hb is not None else 0.0
            history.append({"generation": gen, "evaluations": evals, "mean_hv": mhv, "mps_size": int(len(e))})
        return history, (hb.to_dict() if hb is not None else None)


def run_algorithm(
    config: AlgorithmConfig, case: int, scenario: CityScenario, record_history: bool = True
) -> RunResult:
    """Run one algorithm on one case until the evaluation budget is spent."""
    return _Runner(config, case, scenario, record_history).run()
