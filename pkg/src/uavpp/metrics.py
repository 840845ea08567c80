"""Hypervolume, meanHV over decision makers, normalisation bounds, replicate statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from . import kernels

REFERENCE = (1.1, 1.1)


def hv_2d(points, reference=(1.0, 1.0)) -> float:
    """Exact area dominated by ``points`` and bounded by ``reference`` (minimisation)."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    return kernels.hv2d(pts, reference)


@dataclass
class NormalizationBounds:
    ideal: list[np.ndarray]  # one array per party
    nadir: list[np.ndarray]

    def to_dict(self) -> dict:
        return {"ideal": [a.tolist() for a in self.ideal], "nadir": [a.tolist() for a in self.nadir]}

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationBounds":
        return cls([np.asarray(a, dtype=float) for a in d["ideal"]], [np.asarray(a, dtype=float) for a in d["nadir"]])

    def normalize(self, party: int, values) -> np.ndarray:
        v = np.asarray(values, dtype=np.float64).reshape(-1, len(self.ideal[party]))
        return (v - self.ideal[party]) / (self.nadir[party] - self.ideal[party])


def compute_bounds(solution_sets: Iterable[Sequence]) -> NormalizationBounds:
    """Per-party ideal/nadir over the union of solution sets.

    Each set is a sequence of per-party objective arrays.  A zero-range
    objective gets ``nadir = ideal + 1``.
    """
    stacked: list[list[np.ndarray]] | None = None
    for s in solution_sets:
        if stacked is None:
            stacked = [[] for _ in s]
        for k, arr in enumerate(s):
            arr = np.asarray(arr, dtype=np.float64)
            if arr.size:
                stacked[k].append(arr.reshape(len(arr), -1))
    if stacked is None or any(not parts for parts in stacked):
        raise ValueError("cannot compute bounds of an empty union")
    ideal, nadir = [], []
    for parts in stacked:
        allv = np.vstack(parts)
        lo, hi = allv.min(axis=0), allv.max(axis=0)
        hi = np.where(hi > lo, hi, lo + 1.0)
        ideal.append(lo)
        nadir.append(hi)
    return NormalizationBounds(ideal, nadir)


@dataclass
class MetricRecord:
    hv_per_party: list[float]
    mean_hv: float
    set_size: int

    def to_dict(self) -> dict:
        return {"hv_per_party": list(self.hv_per_party), "mean_hv": self.mean_hv, "set_size": self.set_size}


def mean_hv(solution_set: Sequence, bounds: NormalizationBounds, reference=REFERENCE) -> MetricRecord:
    """Average over parties of the hypervolume of the normalised party front."""
    K = len(solution_set)
    size = len(np.asarray(solution_set[0]))
    if size == 0:
        return MetricRecord([0.0] * K, 0.0, 0)
    hvs = []
    for k, arr in enumerate(solution_set):
        norm = np.clip(bounds.normalize(k, arr), 0.0, reference[0])
        hvs.append(hv_2d(norm, reference))
    return MetricRecord(hvs, float(np.mean(hvs)), size)


@dataclass
class ReplicateSummary:
    mean: dict[str, float]
    std: dict[str, float]
    n: dict[str, int]
    p_values: dict[tuple[str, str], float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std": self.std,
            "n": self.n,
            "p_values": [{"a": a, "b": b, "p": p} for (a, b), p in sorted(self.p_values.items())],
        }


def rank_sum_p(a, b) -> float:
    """Two-sided Wilcoxon rank-sum (Mann-Whitney U) p-value."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    if np.all(a == a[0]) and np.all(b == a[0]):
        return 1.0
    return float(stats.mannwhitneyu(a, b, alternative="two-sided").pvalue)


def aggregate_replicates(records: dict[str, Sequence[float]]) -> ReplicateSummary:
    for name, vals in records.items():
        if len(vals) < 2:
            raise ValueError(f"insufficient runs for {name!r}: need >= 2, got {len(vals)}")
    mean = {k: float(np.mean(v)) for k, v in records.items()}
    std = {k: float(np.std(v, ddof=1)) for k, v in records.items()}
    n = {k: len(v) for k, v in records.items()}
    pv = {(a, b): rank_sum_p(records[a], records[b]) for a, b in combinations(records, 2)}
    return ReplicateSummary(mean, std, n, pv)
