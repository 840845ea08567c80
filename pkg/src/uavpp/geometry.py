"""Genome decoding to 3-D waypoint polylines and kinematic/terrain constraints.

A genome holds 88 reals: 44 lateral offsets (m, left of the start->end chord)
followed by 44 altitudes (m).  Interior waypoint k (1..44) sits at chord
parameter k/45, so a decoded path always has 46 points.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .scenario import CityScenario

N_WAYPOINTS = 44
N_GENES = 2 * N_WAYPOINTS
N_POINTS = N_WAYPOINTS + 2


def bounds(scenario: CityScenario) -> tuple[np.ndarray, np.ndarray]:
    lb = np.concatenate([np.full(N_WAYPOINTS, -scenario.max_offset), np.full(N_WAYPOINTS, scenario.h_min)])
    ub = np.concatenate([np.full(N_WAYPOINTS, scenario.max_offset), np.full(N_WAYPOINTS, scenario.h_max)])
    return lb, ub


def decode_batch(genomes: np.ndarray, scenario: CityScenario) -> np.ndarray:
    """Decode ``(N, 88)`` genomes to ``(N, 46, 3)`` point arrays in meters."""
    g = np.atleast_2d(np.asarray(genomes, dtype=np.float64))
    if g.shape[1] != N_GENES:
        raise ValueError(f"genome length must be {N_GENES}, got {g.shape[1]}")
    n = g.shape[0]
    s = scenario.to_meters(scenario.start)
    e = scenario.to_meters(scenario.end)
    chord = e - s
    u = chord / np.linalg.norm(chord)
    normal = np.array([-u[1], u[0]])
    t = np.arange(1, N_WAYPOINTS + 1) / (N_WAYPOINTS + 1)
    base = s + t[:, None] * chord  # (44, 2)
    pts = np.empty((n, N_POINTS, 3))
    pts[:, 1:-1, :2] = base[None] + g[:, :N_WAYPOINTS, None] * normal
    pts[:, 1:-1, 2] = g[:, N_WAYPOINTS:]
    z_end = scenario.endpoint_z
    pts[:, 0] = (s[0], s[1], z_end)
    pts[:, -1] = (e[0], e[1], z_end)
    return pts


def decode(genome: np.ndarray, scenario: CityScenario) -> np.ndarray:
    return decode_batch(genome, scenario)[0]


def turning_angles(points: np.ndarray) -> np.ndarray:
    """Angles between consecutive horizontal segment projections, shape ``(..., n_seg - 1)``.

    Degenerate (zero-length) projections give 0.
    """
    g = np.diff(points[..., :2], axis=-2)
    a, b = g[..., :-1, :], g[..., 1:, :]
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    denom = na * nb
    ok = denom > 0
    cos = np.where(ok, np.sum(a * b, axis=-1) / np.where(ok, denom, 1.0), 1.0)
    return np.arccos(np.clip(cos, -1.0, 1.0))


def slope_angles(points: np.ndarray) -> np.ndarray:
    """Climb angle of each segment, shape ``(..., n_seg)``; vertical segments give +/- pi/2."""
    g = np.diff(points, axis=-2)
    run = np.linalg.norm(g[..., :2], axis=-1)
    return np.arctan2(g[..., 2], run)


def turning_angle(points: np.ndarray, i: int) -> float:
    return float(turning_angles(np.asarray(points, dtype=np.float64)[i : i + 3])[0])


def slope_angle(points: np.ndarray, i: int) -> float:
    return float(slope_angles(np.asarray(points, dtype=np.float64)[i : i + 2])[0])


@dataclass(frozen=True)
class ConstraintReport:
    terrain_violation: float
    turn_violation: float
    slope_violation: float
    total: float

    @property
    def feasible(self) -> bool:
        return self.total == 0.0


def violations_batch(points: np.ndarray, scenario: CityScenario) -> np.ndarray:
    """Columns: terrain (m), turn (rad), slope (rad), normalised total."""
    z = points[..., 2]
    terrain = np.sum(np.maximum(scenario.h_min - z, 0.0) + np.maximum(z - scenario.h_max, 0.0), axis=-1)
    turn = np.sum(np.maximum(np.abs(turning_angles(points)) - scenario.alpha_max, 0.0), axis=-1)
    slope = np.sum(np.maximum(np.abs(slope_angles(points)) - scenario.beta_max, 0.0), axis=-1)
    total = terrain / (scenario.h_max - scenario.h_min) + turn / scenario.alpha_max + slope / scenario.beta_max
    return np.stack([terrain, turn, slope, total], axis=-1)


def constraint_report(points: np.ndarray, scenario: CityScenario) -> ConstraintReport:
    v = violations_batch(np.asarray(points, dtype=np.float64), scenario)
    return ConstraintReport(*(float(x) for x in v))


def write_path_csv(points: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["idx", "x_m", "y_m", "z_m"])
        for k, (x, y, z) in enumerate(points):
            w.writerow([k, repr(float(x)), repr(float(y)), repr(float(z))])


def read_path_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([[float(r["x_m"]), float(r["y_m"]), float(r["z_m"])] for r in rows])
