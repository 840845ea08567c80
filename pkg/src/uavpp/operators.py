"""Variation operators: uniform initialisation, SBX, DE/rand-style variants, polynomial mutation.

The ``*_from_draws`` functions are deterministic given their uniform draws;
the rng-taking wrappers fix the order in which draws are consumed.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

DE_VARIANTS = ("DE1", "DE2", "DE3")
DEFAULT_DE_PARAMS = {"DE1": (0.9, 0.7), "DE2": (0.5, 0.5), "DE3": (0.1, 0.5)}  # (CR, F)


def initialize(n: int, lb, ub, rng: np.random.Generator) -> np.ndarray:
    lb = np.asarray(lb, dtype=np.float64)
    ub = np.asarray(ub, dtype=np.float64)
    return lb + (ub - lb) * rng.random((n, lb.size))


def sbx_spread(u, dis_c: float):
    u = np.asarray(u, dtype=np.float64)
    expo = 1.0 / (1.0 + dis_c)
    with np.errstate(divide="ignore"):
        return np.where(u < 0.5, (2.0 * u) ** expo, (1.0 / (2.0 - 2.0 * u)) ** expo)


def sbx_from_draws(c, a, dis_c: float, u_cross, u_delta, p_c: float = 1.0):
    c = np.asarray(c, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    d = sbx_spread(u_delta, dis_c)
    child = 0.5 * ((1.0 + d) * c + (1.0 - d) * a)
    return np.where(np.asarray(u_cross) < p_c, child, c)


def sbx(c, a, dis_c: float, p_c: float, rng: np.random.Generator, lb=None, ub=None):
    """One child per (clone, partner) pair, gene-wise; clamped when bounds are given."""
    c = np.asarray(c, dtype=np.float64)
    u_cross = rng.random(c.shape)
    u_delta = rng.random(c.shape)
    out = sbx_from_draws(c, a, dis_c, u_cross, u_delta, p_c)
    if lb is not None:
        out = np.clip(out, lb, ub)
    return out


def sbx_pair(p1, p2, dis_c: float, p_c: float, rng: np.random.Generator, lb, ub):
    """Two symmetric children per parent pair (generational GA form)."""
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    u_cross = rng.random(p1.shape)
    d = sbx_spread(rng.random(p1.shape), dis_c)
    take = u_cross < p_c
    c1 = np.where(take, 0.5 * ((1.0 + d) * p1 + (1.0 - d) * p2), p1)
    c2 = np.where(take, 0.5 * ((1.0 - d) * p1 + (1.0 + d) * p2), p2)
    return np.clip(c1, lb, ub), np.clip(c2, lb, ub)


def de_from_draws(c, a1, a2, a3, a4, cr, f, two_pairs, u_mask, j_r):
    """Binomial DE on rows of ``c``: ``c + F(a1 - a2) [+ F(a3 - a4)]`` where the mask fires.

    ``cr``, ``f`` and ``two_pairs`` are per-row; ``j_r`` is the forced gene per row.
    """
    c = np.atleast_2d(np.asarray(c, dtype=np.float64))
    cr = np.asarray(cr, dtype=np.float64).reshape(-1, 1)
    f = np.asarray(f, dtype=np.float64).reshape(-1, 1)
    two = np.asarray(two_pairs, dtype=bool).reshape(-1, 1)
    mutant = c + f * (a1 - a2) + np.where(two, f * (np.asarray(a3) - np.asarray(a4)), 0.0)
    cols = np.arange(c.shape[1])[None, :]
    mask = (np.atleast_2d(u_mask) < cr) | (cols == np.asarray(j_r).reshape(-1, 1))
    return np.where(mask, mutant, c)


def draw_distinct(pool: int, rows: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """``rows`` x ``k`` indices into ``range(pool)``, distinct within a row when possible."""
    if pool >= k:
        return np.argsort(rng.random((rows, pool)), axis=1)[:, :k]
    log.warning("only %d parents available for %d distinct draws; sampling with replacement", pool, k)
    return rng.integers(pool, size=(rows, k))


def de_variants(c, activated, variants, rng: np.random.Generator, lb, ub, params=None):
    """Apply DE1/DE2/DE3 per row of ``c`` with parents drawn from ``activated``."""
    params = DEFAULT_DE_PARAMS if params is None else params
    c = np.atleast_2d(np.asarray(c, dtype=np.float64))
    activated = np.atleast_2d(activated)
    variants = np.broadcast_to(np.asarray(variants), (len(c),))
    n, d = c.shape
    pick = draw_distinct(len(activated), n, 4, rng)
    a = activated[pick]  # (n, 4, d)
    u_mask = rng.random((n, d))
    j_r = rng.integers(d, size=n)
    cr = np.array([params[v][0] for v in variants])
    f = np.array([params[v][1] for v in variants])
    out = de_from_draws(c, a[:, 0], a[:, 1], a[:, 2], a[:, 3], cr, f, variants == "DE1", u_mask, j_r)
    return np.clip(out, lb, ub)


def pm_from_draws(x, dis_m: float, p_m: float, lb, ub, u_apply, u):
    """Bounded polynomial mutation."""
    x = np.asarray(x, dtype=np.float64)
    lb = np.broadcast_to(np.asarray(lb, dtype=np.float64), x.shape)
    ub = np.broadcast_to(np.asarray(ub, dtype=np.float64), x.shape)
    span = ub - lb
    safe = np.where(span > 0, span, 1.0)
    d1 = (x - lb) / safe
    d2 = (ub - x) / safe
    power = 1.0 / (dis_m + 1.0)
    low = u < 0.5
    val_lo = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (dis_m + 1.0)
    val_hi = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (dis_m + 1.0)
    with np.errstate(invalid="ignore"):
        dq = np.where(low, np.abs(val_lo) ** power - 1.0, 1.0 - np.abs(val_hi) ** power)
    moved = x + dq * span
    out = np.where((u_apply < p_m) & (span > 0), moved, x)
    return np.clip(out, lb, ub)


def polynomial_mutation(x, dis_m: float, p_m: float, lb, ub, rng: np.random.Generator):
    x = np.asarray(x, dtype=np.float64)
    u_apply = rng.random(x.shape)
    u = rng.random(x.shape)
    return pm_from_draws(x, dis_m, p_m, lb, ub, u_apply, u)


@dataclass
class StrategyStats:
    """Sliding window of per-generation (uses, successes) counts for each DE variant."""

    window: int = 5
    history: deque = field(default_factory=deque)

    def record(self, uses, successes) -> None:
        self.history.append((np.asarray(uses, dtype=float), np.asarray(successes, dtype=float)))
        while len(self.history) > self.window:
            self.history.popleft()

    def totals(self) -> tuple[np.ndarray, np.ndarray]:
        uses = np.zeros(len(DE_VARIANTS))
        succ = np.zeros(len(DE_VARIANTS))
        for u, s in self.history:
            uses += u
            succ += s
        return uses, succ

    def probabilities(self) -> np.ndarray:
        uses, succ = self.totals()
        w = (succ + 1.0) / (uses + 1.0)
        return w / w.sum()


def adaptive_de_select(stats: StrategyStats, rng: np.random.Generator, size: int | None = None):
    """Sample DE variant names with success-proportional probabilities."""
    idx = rng.choice(len(DE_VARIANTS), size=size, p=stats.probabilities())
    names = np.asarray(DE_VARIANTS)
    return str(names[idx]) if size is None else names[idx]
