"""Nondominated sorting, crowding, and the multiparty layerings built on them.

Every sorter applies constrained domination when violations are supplied:
feasible beats infeasible, lower violation beats higher among infeasible
solutions, and Pareto dominance decides among feasible ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels


def fast_nds(points, violations=None) -> np.ndarray:
    """1-based nondominated ranks of ``points`` (shape ``(n, m)``)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        return np.zeros(0, dtype=np.int64)
    return kernels.nds_ranks(pts.reshape(len(pts), -1), violations)


def crowding_distance(points, scale=None) -> np.ndarray:
    """Crowding distance of one front; boundary points get ``inf``.

    Without ``scale`` each objective is normalised by the front's own range.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    return kernels.crowding(pts, scale)


def layer_crowding(points, layers) -> np.ndarray:
    """Crowding inside each layer, objectives min-max scaled over the whole candidate set."""
    pts = np.asarray(points, dtype=np.float64)
    cd = np.zeros(len(pts))
    if len(pts) == 0:
        return cd
    scale = pts.max(axis=0) - pts.min(axis=0)
    for lv in np.unique(layers):
        idx = np.flatnonzero(layers == lv)
        cd[idx] = crowding_distance(pts[idx], scale)
    return cd


@dataclass
class RankedPopulation:
    party_ranks: np.ndarray  # (n, K)
    layer: np.ndarray  # (n,)
    crowding: np.ndarray  # (n,), inf marks boundary points
    violation: np.ndarray  # (n,)

    @property
    def feasible(self) -> np.ndarray:
        return self.violation <= 0.0

    def __len__(self):
        return len(self.layer)

    def order(self) -> np.ndarray:
        """Indices sorted by layer ascending, crowding descending, index ascending."""
        n = len(self.layer)
        return np.lexsort((np.arange(n), -self.crowding, self.layer))


def _prep(parties: Sequence, violations):
    parties = [np.asarray(p, dtype=np.float64).reshape(len(p), -1) for p in parties]
    n = len(parties[0])
    if any(len(p) != n for p in parties):
        raise ValueError("all parties must describe the same individuals")
    viol = np.zeros(n) if violations is None else np.asarray(violations, dtype=np.float64)
    return parties, viol


def party_ranks(parties: Sequence, violations=None) -> np.ndarray:
    parties, viol = _prep(parties, violations)
    return np.column_stack([fast_nds(p, viol) for p in parties]).astype(np.int64)


def mpnds2(parties: Sequence, violations=None) -> RankedPopulation:
    """Two-round sorting: per-party ranks, then nondominated sorting of the rank vectors.

    ``parties`` is a sequence of ``(n, m_k)`` objective arrays, one per
    decision maker (efficiency first, safety second in this package).
    """
    parties, viol = _prep(parties, violations)
    pr = party_ranks(parties, viol)
    # rank vectors already encode feasibility, so the final pass is unconstrained
    layer = fast_nds(pr[:, ::-1].astype(np.float64))
    cd = layer_crowding(np.hstack(parties), layer)
    return RankedPopulation(pr, layer, cd, viol)


def optmpnds(parties: Sequence, violations=None) -> RankedPopulation:
    """Layering by ascending sum of per-party ranks; equal sums share a layer.

    Stand-in for the original OptMPNDS ordering.  A dominated rank vector
    always has a larger sum, so dominance between rank vectors is never inverted.
    """
    parties, viol = _prep(parties, violations)
    pr = party_ranks(parties, viol)
    sums = pr.sum(axis=1)
    _, layer = np.unique(sums, return_inverse=True)
    layer = layer.astype(np.int64) + 1
    cd = layer_crowding(np.hstack(parties), layer)
    return RankedPopulation(pr, layer, cd, viol)


def nds_sorter(parties: Sequence, violations=None) -> RankedPopulation:
    """Plain NSGA-II ranking over the concatenated objectives of all parties."""
    parties, viol = _prep(parties, violations)
    joint = np.hstack(parties)
    layer = fast_nds(joint, viol)
    cd = layer_crowding(joint, layer)
    return RankedPopulation(layer[:, None].copy(), layer, cd, viol)


SORTERS = {"mpnds2": mpnds2, "optmpnds": optmpnds, "nds": nds_sorter}


def extract_mps(parties: Sequence, violations=None) -> np.ndarray:
    """Indices of feasible individuals that are rank 1 for every party."""
    parties, viol = _prep(parties, violations)
    feas = viol <= 0.0
    if not feas.any():
        return np.zeros(0, dtype=np.int64)
    pr = party_ranks(parties, viol)
    return np.flatnonzero(feas & (pr == 1).all(axis=1))
