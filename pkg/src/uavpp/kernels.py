"""Hot numeric kernels: constrained nondominated ranking, crowding, 2-D hypervolume.

Each kernel exists twice: an explicit-loop version compiled with ``numba.njit``
and a vectorised pure-numpy version.  The public names (``nds_ranks``,
``crowding``, ``hv2d``) are bound at import time to the numba path when numba
is importable, unless ``UAVPP_DISABLE_NUMBA`` is set to a truthy value.

Both paths are always importable as ``*_loop`` / ``*_numpy`` so tests and the
benchmark can compare them directly.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional extra
    numba = None
    HAVE_NUMBA = False


def _env_disabled() -> bool:
    return os.environ.get("UAVPP_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def _jit(func):
    if HAVE_NUMBA:
        return numba.njit(cache=True)(func)
    return func


# ---------------------------------------------------------------------------
# nondominated ranking
# ---------------------------------------------------------------------------


def _nds_ranks_loop(obj, viol):
    n, m = obj.shape
    ranks = np.zeros(n, dtype=np.int64)
    if n == 0:
        return ranks
    counts = np.zeros(n, dtype=np.int64)
    # dominated[i, :ndom[i]] lists the individuals i dominates
    dominated = np.empty((n, n), dtype=np.int64)
    ndom = np.zeros(n, dtype=np.int64)
    for i in range(n):
        fi = viol[i] <= 0.0
        for j in range(i + 1, n):
            fj = viol[j] <= 0.0
            rel = 0  # 1: i dominates j, -1: j dominates i
            if fi and not fj:
                rel = 1
            elif fj and not fi:
                rel = -1
            elif not fi:
                if viol[i] < viol[j]:
                    rel = 1
                elif viol[j] < viol[i]:
                    rel = -1
            else:
                better = False
                worse = False
                for k in range(m):
                    if obj[i, k] < obj[j, k]:
                        better = True
                    elif obj[i, k] > obj[j, k]:
                        worse = True
                    if better and worse:
                        break
                if better and not worse:
                    rel = 1
                elif worse and not better:
                    rel = -1
            if rel == 1:
                dominated[i, ndom[i]] = j
                ndom[i] += 1
                counts[j] += 1
            elif rel == -1:
                dominated[j, ndom[j]] = i
                ndom[j] += 1
                counts[i] += 1
    front = np.empty(n, dtype=np.int64)
    size = 0
    for i in range(n):
        if counts[i] == 0:
            front[size] = i
            size += 1
            ranks[i] = 1
    nxt = np.empty(n, dtype=np.int64)
    rank = 1
    while size > 0:
        rank += 1
        nsize = 0
        for a in range(size):
            i = front[a]
            for b in range(ndom[i]):
                j = dominated[i, b]
                counts[j] -= 1
                if counts[j] == 0:
                    ranks[j] = rank
                    nxt[nsize] = j
                    nsize += 1
        for a in range(nsize):
            front[a] = nxt[a]
        size = nsize
    return ranks


def dominance_matrix_numpy(obj: np.ndarray, viol: np.ndarray) -> np.ndarray:
    """Boolean matrix ``D[i, j]``: i constrained-dominates j."""
    le = (obj[:, None, :] <= obj[None, :, :]).all(axis=2)
    lt = (obj[:, None, :] < obj[None, :, :]).any(axis=2)
    pareto = le & lt
    feas = viol <= 0.0
    both_feas = feas[:, None] & feas[None, :]
    both_infeas = ~feas[:, None] & ~feas[None, :]
    return (
        (both_feas & pareto)
        | (feas[:, None] & ~feas[None, :])
        | (both_infeas & (viol[:, None] < viol[None, :]))
    )


def _nds_ranks_numpy(obj, viol):
    n = obj.shape[0]
    ranks = np.zeros(n, dtype=np.int64)
    if n == 0:
        return ranks
    dom = dominance_matrix_numpy(obj, viol)
    counts = dom.sum(axis=0)
    remaining = np.ones(n, dtype=bool)
    rank = 0
    while remaining.any():
        rank += 1
        front = remaining & (counts == 0)
        ranks[front] = rank
        remaining &= ~front
        counts = counts - dom[front].sum(axis=0)
    return ranks


# ---------------------------------------------------------------------------
# crowding distance
# ---------------------------------------------------------------------------


def _crowding_loop(obj, scale):
    n, m = obj.shape
    cd = np.zeros(n)
    if n <= 2:
        cd[:] = np.inf
        return cd
    for k in range(m):
        col = obj[:, k].copy()
        order = np.argsort(col, kind="mergesort")
        lo = col[order[0]]
        hi = col[order[n - 1]]
        span = hi - lo
        if span <= 0.0:
            continue
        cd[order[0]] = np.inf
        cd[order[n - 1]] = np.inf
        denom = scale[k] if scale[k] > 0.0 else span
        for a in range(1, n - 1):
            i = order[a]
            if cd[i] != np.inf:
                cd[i] += (col[order[a + 1]] - col[order[a - 1]]) / denom
    return cd


def _crowding_numpy(obj, scale):
    n, m = obj.shape
    if n <= 2:
        return np.full(n, np.inf)
    order = np.argsort(obj, axis=0, kind="stable")
    srt = np.take_along_axis(obj, order, axis=0)
    span = srt[-1] - srt[0]
    live = span > 0.0
    gaps = np.zeros((n, m))
    denom = np.where(scale > 0.0, scale, np.where(live, span, 1.0))
    gaps[1:-1] = (srt[2:] - srt[:-2]) / denom
    gaps[0] = np.inf
    gaps[-1] = np.inf
    gaps[:, ~live] = 0.0
    cd = np.zeros(n)
    for k in range(m):
        cd[order[:, k]] += gaps[:, k]
    return cd


# ---------------------------------------------------------------------------
# 2-D hypervolume
# ---------------------------------------------------------------------------


def _hv2d_loop(pts, r0, r1):
    n = pts.shape[0]
    if n == 0:
        return 0.0
    order = np.argsort(pts[:, 1], kind="mergesort")
    order = order[np.argsort(pts[order, 0], kind="mergesort")]
    area = 0.0
    level = r1
    for a in range(n):
        x = pts[order[a], 0]
        y = pts[order[a], 1]
        if x >= r0 or y >= level:
            continue
        area += (r0 - x) * (level - y)
        level = y
    return area


def _hv2d_numpy(pts, r0, r1):
    if pts.shape[0] == 0:
        return 0.0
    keep = (pts[:, 0] < r0) & (pts[:, 1] < r1)
    p = pts[keep]
    if p.shape[0] == 0:
        return 0.0
    p = p[np.lexsort((p[:, 1], p[:, 0]))]
    # running minimum of y: a point only adds area where it lowers the staircase
    prev = np.concatenate(([r1], np.minimum.accumulate(p[:, 1])[:-1]))
    step = np.clip(prev - p[:, 1], 0.0, None)
    return float(np.sum((r0 - p[:, 0]) * step))


nds_ranks_loop = _jit(_nds_ranks_loop)
crowding_loop = _jit(_crowding_loop)
hv2d_loop = _jit(_hv2d_loop)
nds_ranks_numpy = _nds_ranks_numpy
crowding_numpy = _crowding_numpy
hv2d_numpy = _hv2d_numpy

if USE_NUMBA:
    _nds_impl, _crowd_impl, _hv_impl = nds_ranks_loop, crowding_loop, hv2d_loop
else:
    _nds_impl, _crowd_impl, _hv_impl = nds_ranks_numpy, crowding_numpy, hv2d_numpy


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def nds_ranks(obj: np.ndarray, viol: np.ndarray | None = None) -> np.ndarray:
    """1-based nondominated ranks under constrained domination."""
    obj = np.ascontiguousarray(obj, dtype=np.float64)
    if obj.ndim != 2:
        raise ValueError(f"objectives must be 2-D, got shape {obj.shape}")
    if viol is None:
        viol = np.zeros(obj.shape[0])
    else:
        viol = np.ascontiguousarray(viol, dtype=np.float64)
    return _nds_impl(obj, viol)


def crowding(obj: np.ndarray, scale: np.ndarray | None = None) -> np.ndarray:
    """Crowding distance of one front.

    Gaps are divided by ``scale`` (per objective) when it is positive, else by
    the front's own range.  Objectives constant on the front contribute nothing.
    """
    obj = np.ascontiguousarray(obj, dtype=np.float64)
    if scale is None:
        scale = np.zeros(obj.shape[1])
    return _crowd_impl(obj, np.ascontiguousarray(scale, dtype=np.float64))


def hv2d(pts: np.ndarray, ref) -> float:
    pts = np.ascontiguousarray(pts, dtype=np.float64).reshape(-1, 2)
    return float(_hv_impl(pts, float(ref[0]), float(ref[1])))
