"""Synthetic city environment and the physical/risk parameters of the model."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np


class ScenarioError(ValueError):
    """Base class for scenario problems; ``field`` names the offending key."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class ScenarioParseError(ScenarioError):
    pass


class ScenarioValidationError(ScenarioError):
    pass


def _require(cond: bool, name: str, message: str) -> None:
    if not cond:
        raise ScenarioValidationError(f"{name}: {message}", field=name)


@dataclass(frozen=True, eq=False)
class GridField:
    """Row-major raster: ``values[j, i]`` is the cell at column i, row j."""

    width_cells: int
    height_cells: int
    cell_size: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64).reshape(self.height_cells, self.width_cells)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def validate(self, name: str = "field") -> None:
        _require(self.width_cells > 0 and self.height_cells > 0, name, "grid must be non-empty")
        _require(self.cell_size > 0, name, "cell_size must be positive")
        _require(bool(np.all(np.isfinite(self.values))), name, "values must be finite")
        _require(bool(np.all(self.values >= 0)), name, "values must be non-negative")

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def __eq__(self, other):
        if not isinstance(other, GridField):
            return NotImplemented
        return (
            self.width_cells == other.width_cells
            and self.height_cells == other.height_cells
            and self.cell_size == other.cell_size
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def sample_field(grid: GridField, x, y):
    """Nearest-cell lookup at metric coordinates; out-of-grid points clamp to the border.

    Works on scalars or arrays of matching shape.
    """
    i = np.clip(np.floor(np.asarray(x, dtype=np.float64) / grid.cell_size), 0, grid.width_cells - 1)
    j = np.clip(np.floor(np.asarray(y, dtype=np.float64) / grid.cell_size), 0, grid.height_cells - 1)
    out = grid.values[j.astype(np.intp), i.astype(np.intp)]
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class UavParams:
    mass: float = 1.38
    gravity: float = 9.81
    rotor_count: int = 4
    disk_area: float = 0.1
    speed: float = 10.0
    rho0: float = 1.225
    density_scale_height: float = 10700.0

    def validate(self) -> None:
        for name in ("mass", "gravity", "disk_area", "speed", "rho0", "density_scale_height"):
            _require(getattr(self, name) > 0, f"uav.{name}", "must be strictly positive")
        _require(int(self.rotor_count) >= 1, "uav.rotor_count", "must be >= 1")


@dataclass(frozen=True)
class RiskParams:
    """Ground-risk constants.  ``vehicle_*`` default to the pedestrian values when None.

    ``impact_model`` selects the fall-velocity law: ``"drag_fall"`` (v(0) = 0,
    rising to terminal velocity) or ``"printed"`` (the drag factor in the
    denominator, kept for comparison only).
    """

    p_crash: float = 1e-6
    crash_area: float = 1.0
    alpha: float = 1e6
    beta: float = 100.0
    sheltering: float = 0.5
    drag_coeff: float = 0.3
    vehicle_alpha: float | None = None
    vehicle_beta: float | None = None
    vehicle_sheltering: float | None = None
    impact_model: str = "drag_fall"

    def validate(self) -> None:
        _require(0.0 <= self.p_crash <= 1.0, "risk.p_crash", "must lie in [0, 1]")
        _require(self.crash_area > 0, "risk.crash_area", "must be positive")
        _require(self.drag_coeff > 0, "risk.drag_coeff", "must be positive")
        _require(self.beta > 0, "risk.beta", "must be positive")
        _require(self.alpha > self.beta, "risk.alpha", "must exceed beta")
        _require(0.0 < self.sheltering <= 1.0, "risk.sheltering", "must lie in (0, 1]")
        va, vb, vs = self.vehicle_impact()
        _require(vb > 0 and va > vb, "risk.vehicle_alpha", "vehicle alpha must exceed vehicle beta > 0")
        _require(0.0 < vs <= 1.0, "risk.vehicle_sheltering", "must lie in (0, 1]")
        _require(self.impact_model in ("drag_fall", "printed"), "risk.impact_model", "unknown model")

    def vehicle_impact(self) -> tuple[float, float, float]:
        return (
            self.alpha if self.vehicle_alpha is None else self.vehicle_alpha,
            self.beta if self.vehicle_beta is None else self.vehicle_beta,
            self.sheltering if self.vehicle_sheltering is None else self.vehicle_sheltering,
        )


@dataclass(frozen=True)
class NoiseParams:
    k: float = 1.0
    source_level: float = 80.0
    lateral_offset: float = 0.0
    threshold: float = 40.0

    def validate(self) -> None:
        _require(self.threshold > 0, "noise.threshold", "must be positive")
        _require(self.source_level > self.threshold, "noise.source_level", "must exceed threshold")
        _require(self.k > 0, "noise.k", "must be positive")
        _require(self.lateral_offset >= 0, "noise.lateral_offset", "must be non-negative")


@dataclass(frozen=True)
class PopCenter:
    x: float  # m
    y: float  # m
    amplitude: float  # persons / m^2
    spread: float  # m


@dataclass(frozen=True)
class Road:
    points: tuple[tuple[float, float], ...]  # m
    amplitude: float  # vehicles / m^2
    width: float  # m


@dataclass(frozen=True, eq=False)
class CityScenario:
    pop_density: GridField
    traffic_density: GridField
    pop_centers: tuple[PopCenter, ...]
    roads: tuple[Road, ...]
    building_mu: float = 3.04670
    building_sigma: float = 0.76023
    start: tuple[float, float] = (1.0, 1.0)
    end: tuple[float, float] = (49.0, 49.0)
    uhps: tuple[tuple[float, float], ...] = ((25.0, 30.0), (34.0, 20.0), (40.0, 35.0))
    h_min: float = 10.0
    h_max: float = 120.0
    endpoint_altitude: float | None = None
    max_offset: float = 200.0  # wider bounds leave random paths far from turn-feasible
    alpha_max: float = math.pi / 3
    beta_max: float = math.pi / 4
    uav: UavParams = field(default_factory=UavParams)
    risk: RiskParams = field(default_factory=RiskParams)
    noise: NoiseParams = field(default_factory=NoiseParams)

    @property
    def cell_size(self) -> float:
        return self.pop_density.cell_size

    @property
    def endpoint_z(self) -> float:
        if self.endpoint_altitude is None:
            return 0.5 * (self.h_min + self.h_max)
        return self.endpoint_altitude

    def to_meters(self, pt) -> np.ndarray:
        return np.asarray(pt, dtype=np.float64) * self.cell_size

    def validate(self) -> None:
        self.pop_density.validate("pop_density")
        self.traffic_density.validate("traffic_density")
        pd, td = self.pop_density, self.traffic_density
        _require(
            (pd.width_cells, pd.height_cells, pd.cell_size) == (td.width_cells, td.height_cells, td.cell_size),
            "grid",
            "density rasters must share a grid",
        )
        _require(self.building_sigma > 0, "building_sigma", "must be positive")
        _require(math.isfinite(self.building_mu), "building_mu", "must be finite")
        _require(self.h_min < self.h_max, "h_min", "h_min must be below h_max")
        _require(self.h_min >= 0, "h_min", "must be non-negative")
        _require(0 < self.alpha_max <= math.pi, "alpha_max", "must lie in (0, pi]")
        _require(0 < self.beta_max < math.pi / 2, "beta_max", "must lie in (0, pi/2)")
        _require(self.max_offset > 0, "max_offset", "must be positive")
        w, h = pd.width_cells, pd.height_cells
        for name, pts in (("start", [self.start]), ("end", [self.end]), ("uhps", list(self.uhps))):
            for p in pts:
                _require(0 <= p[0] <= w and 0 <= p[1] <= h, name, f"point {tuple(p)} outside grid")
        _require(len(self.uhps) >= 1, "uhps", "at least one hover point required")
        self.uav.validate()
        self.risk.validate()
        self.noise.validate()

    def __eq__(self, other):
        if not isinstance(other, CityScenario):
            return NotImplemented
        return to_dict(self) == to_dict(other)

    __hash__ = None


# ---------------------------------------------------------------------------
# density synthesis
# ---------------------------------------------------------------------------

_DEFAULT_CENTERS = (
    PopCenter(2700.0, 2500.0, 0.012, 600.0),
    PopCenter(3900.0, 1100.0, 0.004, 400.0),
    PopCenter(1200.0, 3900.0, 0.003, 400.0),
)

_DEFAULT_ROADS = (
    Road(((0.0, 2050.0), (5000.0, 2050.0)), 0.003, 60.0),
    Road(((3050.0, 0.0), (3050.0, 5000.0)), 0.003, 60.0),
    Road(((0.0, 4400.0), (2200.0, 3000.0), (5000.0, 2700.0)), 0.002, 50.0),
)


def cell_centers(width: int, height: int, cell_size: float) -> tuple[np.ndarray, np.ndarray]:
    xs = (np.arange(width) + 0.5) * cell_size
    ys = (np.arange(height) + 0.5) * cell_size
    return np.meshgrid(xs, ys)


def radial_basis_density(centers, x, y) -> np.ndarray:
    out = np.zeros(np.broadcast(x, y).shape)
    for c in centers:
        r2 = (x - c.x) ** 2 + (y - c.y) ** 2
        out = out + c.amplitude * np.exp(-r2 / (2.0 * c.spread**2))
    return out


def _dist_to_polyline(points, x, y) -> np.ndarray:
    best = np.full(np.broadcast(x, y).shape, np.inf)
    pts = np.asarray(points, dtype=np.float64)
    for (ax, ay), (bx, by) in zip(pts[:-1], pts[1:]):
        dx, dy = bx - ax, by - ay
        L2 = dx * dx + dy * dy
        t = np.zeros_like(best) if L2 == 0 else np.clip(((x - ax) * dx + (y - ay) * dy) / L2, 0.0, 1.0)
        d = np.hypot(x - (ax + t * dx), y - (ay + t * dy))
        best = np.minimum(best, d)
    return best


def road_density(roads, x, y) -> np.ndarray:
    out = np.zeros(np.broadcast(x, y).shape)
    for r in roads:
        d = _dist_to_polyline(r.points, x, y)
        out = out + r.amplitude * np.exp(-(d**2) / (2.0 * r.width**2))
    return out


def build_scenario(
    pop_centers,
    roads,
    width: int = 50,
    height: int = 50,
    cell_size: float = 100.0,
    **kwargs,
) -> CityScenario:
    """Rasterise density generators onto the grid and assemble a validated scenario."""
    X, Y = cell_centers(width, height, cell_size)
    pop = GridField(width, height, cell_size, radial_basis_density(pop_centers, X, Y))
    traffic = GridField(width, height, cell_size, road_density(roads, X, Y))
    sc = CityScenario(
        pop_density=pop,
        traffic_density=traffic,
        pop_centers=tuple(pop_centers),
        roads=tuple(roads),
        **kwargs,
    )
    sc.validate()
    return sc


def generate_default_scenario(seed: int = 0, cell_size: float = 100.0) -> CityScenario:
    """Default 50x50 city; the seed jitters density centres (+/-100 m) and amplitudes (+/-10 %)."""
    rng = np.random.default_rng(seed)
    scale = cell_size / 100.0
    centers = []
    for c in _DEFAULT_CENTERS:
        jx, jy = rng.uniform(-100.0, 100.0, size=2)
        amp = c.amplitude * rng.uniform(0.9, 1.1)
        centers.append(PopCenter(float((c.x + jx) * scale), float((c.y + jy) * scale), float(amp), c.spread * scale))
    roads = [
        Road(tuple((x * scale, y * scale) for x, y in r.points), r.amplitude, r.width * scale) for r in _DEFAULT_ROADS
    ]
    return build_scenario(centers, roads, cell_size=cell_size)


# ---------------------------------------------------------------------------
# JSON persistence
# ---------------------------------------------------------------------------


def to_dict(sc: CityScenario) -> dict:
    pd = sc.pop_density
    return {
        "grid": {"width": pd.width_cells, "height": pd.height_cells, "cell_size_m": pd.cell_size},
        "pop_centers": [asdict(c) for c in sc.pop_centers],
        "roads": [
            {"points": [list(p) for p in r.points], "amplitude": r.amplitude, "width": r.width} for r in sc.roads
        ],
        "buildings": {"mu": sc.building_mu, "sigma": sc.building_sigma},
        "mission": {
            "start": list(sc.start),
            "end": list(sc.end),
            "uhps": [list(p) for p in sc.uhps],
            "h_min": sc.h_min,
            "h_max": sc.h_max,
            "endpoint_altitude": sc.endpoint_altitude,
            "max_offset": sc.max_offset,
        },
        "limits": {"alpha_max": sc.alpha_max, "beta_max": sc.beta_max},
        "uav": asdict(sc.uav),
        "risk": asdict(sc.risk),
        "noise": asdict(sc.noise),
    }


def save_scenario(sc: CityScenario, path) -> None:
    Path(path).write_text(json.dumps(to_dict(sc), indent=2))


_REQUIRED = ("grid", "pop_centers", "roads", "buildings", "mission", "limits", "uav", "risk", "noise")


def _block(doc: dict, key: str, cls):
    blk = doc[key]
    if not isinstance(blk, dict):
        raise ScenarioParseError(f"{key}: expected an object", field=key)
    try:
        return cls(**blk)
    except TypeError as exc:
        raise ScenarioParseError(f"{key}: {exc}", field=key) from exc


def from_dict(doc: dict) -> CityScenario:
    if not isinstance(doc, dict):
        raise ScenarioParseError("scenario document must be a JSON object")
    for key in _REQUIRED:
        if key not in doc:
            raise ScenarioParseError(f"{key}: missing required block", field=key)
    try:
        grid = doc["grid"]
        width, height, cell = int(grid["width"]), int(grid["height"]), float(grid["cell_size_m"])
        centers = [PopCenter(**{k: float(v) for k, v in c.items()}) for c in doc["pop_centers"]]
        roads = [
            Road(tuple((float(x), float(y)) for x, y in r["points"]), float(r["amplitude"]), float(r["width"]))
            for r in doc["roads"]
        ]
        mission = doc["mission"]
        limits = doc["limits"]
        kwargs = dict(
            building_mu=float(doc["buildings"]["mu"]),
            building_sigma=float(doc["buildings"]["sigma"]),
            start=tuple(float(v) for v in mission["start"]),
            end=tuple(float(v) for v in mission["end"]),
            uhps=tuple(tuple(float(v) for v in p) for p in mission["uhps"]),
            h_min=float(mission["h_min"]),
            h_max=float(mission["h_max"]),
            endpoint_altitude=mission.get("endpoint_altitude"),
            max_offset=float(mission.get("max_offset", 200.0)),
            alpha_max=float(limits["alpha_max"]),
            beta_max=float(limits["beta_max"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioParseError(f"malformed scenario: {exc!r}") from exc
    if kwargs["h_min"] >= kwargs["h_max"]:
        raise ScenarioValidationError("h_min: h_min must be below h_max", field="h_min")
    kwargs["uav"] = _block(doc, "uav", UavParams)
    kwargs["risk"] = _block(doc, "risk", RiskParams)
    kwargs["noise"] = _block(doc, "noise", NoiseParams)
    for c in centers:
        _require(c.spread > 0, "pop_centers.spread", "must be positive")
        _require(c.amplitude >= 0, "pop_centers.amplitude", "must be non-negative")
    for r in roads:
        _require(r.width > 0, "roads.width", "must be positive")
        _require(len(r.points) >= 2, "roads.points", "a road needs at least two vertices")
    return build_scenario(centers, roads, width, height, cell, **kwargs)


def load_scenario(path) -> CityScenario:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"invalid JSON in {path}: {exc}") from exc
    return from_dict(doc)
