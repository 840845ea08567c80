"""The seven path objectives and the per-case biparty composition.

All ``f_*`` functions accept a single ``(n, 3)`` path or a ``(N, n, 3)`` batch
and return a float or an ``(N,)`` array accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import decode_batch, violations_batch
from .scenario import CityScenario, RiskParams, UavParams, sample_field

OBJECTIVE_NAMES = ("length", "height", "fuel", "distance", "fatal", "eco", "noise")
_IDX = {name: k for k, name in enumerate(OBJECTIVE_NAMES)}

# (efficiency terms, safety terms); a tuple inside a slot means "sum of these"
CASES = {
    1: ((("length",), ("distance",)), (("fatal",), ("eco",))),
    2: ((("length", "height"), ("distance",)), (("fatal",), ("eco",))),
    3: ((("fuel",), ("distance",)), (("fatal",), ("eco",))),
    4: ((("length",), ("distance",)), (("fatal",), ("noise",))),
    5: ((("length", "height"), ("distance",)), (("fatal",), ("noise",))),
    6: ((("fuel",), ("distance",)), (("fatal",), ("noise",))),
}


class CaseError(ValueError):
    pass


def check_case(case: int) -> int:
    if case not in CASES:
        raise CaseError(f"case id out of range 1..6: {case!r}")
    return case


def party_labels(case: int, party: str) -> tuple[str, str]:
    """Column names for a party's two objectives, e.g. ``("f_length+f_height", "f_distance")``."""
    eff, safe = CASES[check_case(case)]
    slots = {"eff": eff, "safe": safe}[party]
    return tuple("+".join(f"f_{t}" for t in slot) for slot in slots)


def _squeeze(out, single: bool):
    return float(out[0]) if single else out


def _as_batch(path):
    p = np.asarray(path, dtype=np.float64)
    return (p[None], True) if p.ndim == 2 else (p, False)


def f_length(path):
    p, single = _as_batch(path)
    return _squeeze(np.linalg.norm(np.diff(p, axis=-2), axis=-1).sum(axis=-1), single)


def f_height(path):
    p, single = _as_batch(path)
    return _squeeze(np.abs(np.diff(p[..., 2], axis=-1)).sum(axis=-1), single)


def air_density(z1, z2, uav: UavParams):
    return uav.rho0 * np.exp(-(np.asarray(z1) + np.asarray(z2)) / (2.0 * uav.density_scale_height))


def f_fuel(path, uav: UavParams):
    """Hover-power energy over each segment's flight time plus potential energy of climbs (J)."""
    p, single = _as_batch(path)
    g = np.diff(p, axis=-2)
    seg = np.linalg.norm(g, axis=-1)
    rho = air_density(p[..., :-1, 2], p[..., 1:, 2], uav)
    weight = uav.mass * uav.gravity
    power = weight**1.5 / np.sqrt(2.0 * rho * uav.disk_area * uav.rotor_count)
    climb = np.maximum(g[..., 2], 0.0)
    return _squeeze((power * seg / uav.speed + climb * weight).sum(axis=-1), single)


def uhp_points(scenario: CityScenario) -> np.ndarray:
    xy = scenario.to_meters(np.asarray(scenario.uhps, dtype=np.float64).reshape(-1, 2))
    return np.column_stack([xy, np.full(len(xy), scenario.endpoint_z)])


def f_distance(path, scenario: CityScenario):
    p, single = _as_batch(path)
    uhp = uhp_points(scenario)
    d = np.linalg.norm(p[:, :, None, :] - uhp[None, None], axis=-1)  # (N, n, K)
    return _squeeze(d.min(axis=1).sum(axis=-1), single)


def impact_velocity(z, uav: UavParams, risk: RiskParams):
    """Ground-impact speed after an unpowered fall from altitude ``z`` (m/s)."""
    z = np.asarray(z, dtype=np.float64)
    c = risk.drag_coeff * risk.crash_area * uav.rho0
    decay = -np.expm1(-z * c / uav.mass)
    if risk.impact_model == "printed":
        with np.errstate(divide="ignore"):
            v = np.sqrt(2.0 * uav.mass * uav.gravity / (c * decay))
    else:
        v = np.sqrt(2.0 * uav.mass * uav.gravity / c * decay)
    return float(v) if v.ndim == 0 else v


def fatality_from_energy(energy, alpha: float, beta: float, sheltering: float):
    """Probability of fatality for a given impact energy; 0 at zero energy."""
    e = np.asarray(energy, dtype=np.float64)
    pos = e > 0
    with np.errstate(divide="ignore", over="ignore"):
        ratio = np.where(pos, beta / np.where(pos, e, 1.0), 0.0)
        rf = np.where(pos, 1.0 / (1.0 + math.sqrt(alpha / beta) * ratio ** (1.0 / (4.0 * sheltering))), 0.0)
    return float(rf) if rf.ndim == 0 else rf


def fatality_factor(z, uav: UavParams, risk: RiskParams, vehicle: bool = False):
    v = impact_velocity(z, uav, risk)
    energy = 0.5 * uav.mass * np.square(v)
    alpha, beta, sc = risk.vehicle_impact() if vehicle else (risk.alpha, risk.beta, risk.sheltering)
    return fatality_from_energy(energy, alpha, beta, sc)


def f_fatal(path, scenario: CityScenario):
    p, single = _as_batch(path)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    risk, uav = scenario.risk, scenario.uav
    sp = sample_field(scenario.pop_density, x, y)
    sv = sample_field(scenario.traffic_density, x, y)
    rp = fatality_factor(z, uav, risk)
    rv = fatality_factor(z, uav, risk, vehicle=True)
    cost = risk.p_crash * risk.crash_area * (sp * rp + sv * rv)
    return _squeeze(np.asarray(cost).sum(axis=-1), single)


def lognormal_pdf(z, mu: float, sigma: float):
    z = np.asarray(z, dtype=np.float64)
    return np.exp(-((np.log(z) - mu) ** 2) / (2.0 * sigma**2)) / (z * sigma * math.sqrt(2.0 * math.pi))


def property_risk(z, mu: float, sigma: float):
    """Lognormal building-height density, held flat at its median value below the median."""
    z = np.asarray(z, dtype=np.float64)
    if np.any(z <= 0):
        raise ValueError("property risk is undefined for non-positive altitude")
    median = math.exp(mu)
    out = lognormal_pdf(np.maximum(z, median), mu, sigma)
    return float(out) if out.ndim == 0 else out


def f_eco(path, scenario: CityScenario):
    p, single = _as_batch(path)
    return _squeeze(property_risk(p[..., 2], scenario.building_mu, scenario.building_sigma).sum(axis=-1), single)


def noise_cost(sigma_p, z, scenario: CityScenario):
    nz = scenario.noise
    z = np.asarray(z, dtype=np.float64)
    pos = z > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        level = nz.source_level - 20.0 * np.log10(np.where(pos, z, 1.0))
        loud = np.where(pos, level > nz.threshold, nz.lateral_offset > 0)
        cost = nz.k * sigma_p * nz.source_level / (z**2 + nz.lateral_offset**2)
    return np.where(loud, cost, 0.0)


def f_noise(path, scenario: CityScenario):
    p, single = _as_batch(path)
    sp = sample_field(scenario.pop_density, p[..., 0], p[..., 1])
    return _squeeze(noise_cost(sp, p[..., 2], scenario).sum(axis=-1), single)


def raw_objectives(points: np.ndarray, scenario: CityScenario) -> np.ndarray:
    """All seven objectives for a ``(N, n, 3)`` batch; columns follow ``OBJECTIVE_NAMES``."""
    p = np.asarray(points, dtype=np.float64)
    return np.column_stack(
        [
            f_length(p),
            f_height(p),
            f_fuel(p, scenario.uav),
            f_distance(p, scenario),
            f_fatal(p, scenario),
            f_eco(p, scenario),
            f_noise(p, scenario),
        ]
    )


def compose(case: int, raw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    eff_spec, safe_spec = CASES[check_case(case)]
    raw = np.atleast_2d(raw)

    def build(spec):
        return np.column_stack([sum(raw[:, _IDX[t]] for t in slot) for slot in spec])

    return build(eff_spec), build(safe_spec)


@dataclass(frozen=True)
class BipartyEvaluation:
    eff: np.ndarray
    safe: np.ndarray
    violation: float
    raw: dict


@dataclass
class BatchEvaluation:
    """Column-aligned evaluation of many genomes."""

    eff: np.ndarray  # (N, 2)
    safe: np.ndarray  # (N, 2)
    violation: np.ndarray  # (N,)
    raw: np.ndarray  # (N, 7)

    def row(self, i: int) -> BipartyEvaluation:
        return BipartyEvaluation(
            self.eff[i].copy(),
            self.safe[i].copy(),
            float(self.violation[i]),
            dict(zip(OBJECTIVE_NAMES, map(float, self.raw[i]))),
        )


def evaluate_batch(case: int, genomes: np.ndarray, scenario: CityScenario) -> BatchEvaluation:
    check_case(case)
    pts = decode_batch(genomes, scenario)
    raw = raw_objectives(pts, scenario)
    eff, safe = compose(case, raw)
    viol = violations_batch(pts, scenario)[:, 3]
    return BatchEvaluation(eff, safe, viol, raw)


def evaluate_case(case: int, genome: np.ndarray, scenario: CityScenario) -> BipartyEvaluation:
    return evaluate_batch(case, np.atleast_2d(genome), scenario).row(0)
