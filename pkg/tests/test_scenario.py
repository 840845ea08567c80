import json
import math

import numpy as np
import pytest

from uavpp.scenario import (
    GridField,
    ScenarioParseError,
    ScenarioValidationError,
    generate_default_scenario,
    load_scenario,
    radial_basis_density,
    sample_field,
    save_scenario,
    to_dict,
)


def test_generation_is_deterministic():
    a, b = generate_default_scenario(7), generate_default_scenario(7)
    assert a == b
    assert np.array_equal(a.pop_density.values, b.pop_density.values)
    assert np.array_equal(a.traffic_density.values, b.traffic_density.values)
    assert generate_default_scenario(8) != a


def test_defaults_match_mission_setup(scenario):
    assert scenario.uhps == ((25.0, 30.0), (34.0, 20.0), (40.0, 35.0))
    assert scenario.start == (1.0, 1.0) and scenario.end == (49.0, 49.0)
    assert scenario.building_mu == 3.04670 and scenario.building_sigma == 0.76023
    assert scenario.alpha_max == pytest.approx(math.pi / 3)
    assert scenario.beta_max == pytest.approx(math.pi / 4)
    u = scenario.uav
    assert (u.mass, u.rotor_count, u.disk_area, u.speed, u.rho0) == (1.38, 4, 0.1, 10.0, 1.225)
    assert scenario.pop_density.values.shape == (50, 50)
    assert scenario.cell_size == 100.0


@pytest.mark.parametrize("seed", [0, 3, 11])
def test_fields_nonnegative_and_finite(seed):
    sc = generate_default_scenario(seed)
    for f in (sc.pop_density, sc.traffic_density):
        assert np.all(np.isfinite(f.values)) and np.all(f.values >= 0)


def test_radial_basis_peaks_at_center_and_decays_along_rays(scenario):
    c = scenario.pop_centers[0]
    others = scenario.pop_centers[1:]
    r = np.linspace(0, 900, 60)
    for ang in np.linspace(0, 2 * np.pi, 8, endpoint=False):
        x, y = c.x + r * np.cos(ang), c.y + r * np.sin(ang)
        own = radial_basis_density([c], x, y)
        assert np.all(np.diff(own) < 0)
    # the main centre dominates the others, so the sum also peaks there
    xs = np.linspace(c.x - 300, c.x + 300, 61)
    vals = radial_basis_density(scenario.pop_centers, xs, np.full_like(xs, c.y))
    assert abs(xs[np.argmax(vals)] - c.x) <= 10.0
    assert radial_basis_density(others, c.x, c.y) < 0.1 * c.amplitude


def test_save_load_round_trip(tmp_path):
    sc = generate_default_scenario(7)
    p = tmp_path / "s.json"
    save_scenario(sc, p)
    back = load_scenario(p)
    assert back == sc
    assert np.array_equal(back.pop_density.values, sc.pop_density.values)


def test_load_rejects_inverted_altitude_band(tmp_path):
    doc = to_dict(generate_default_scenario(0))
    doc["mission"]["h_min"] = 150.0
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(ScenarioValidationError) as ei:
        load_scenario(p)
    assert ei.value.field == "h_min"
    assert "h_min" in str(ei.value)


def test_load_requires_uav_block(tmp_path):
    doc = to_dict(generate_default_scenario(0))
    del doc["uav"]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(ScenarioParseError, match="uav"):
        load_scenario(p)


def test_load_rejects_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ScenarioParseError):
        load_scenario(p)


def test_validation_names_field():
    doc = to_dict(generate_default_scenario(0))
    doc["risk"]["alpha"] = 10.0  # below beta
    from uavpp.scenario import from_dict

    with pytest.raises(ScenarioValidationError) as ei:
        from_dict(doc)
    assert ei.value.field == "risk.alpha"


def _grid():
    vals = np.arange(12, dtype=float).reshape(3, 4)
    return GridField(4, 3, 10.0, vals)


def test_sample_uniform_field():
    g = GridField(5, 5, 100.0, np.full(25, 0.25))
    assert sample_field(g, 123.0, 456.0) == 0.25
    assert np.all(sample_field(g, np.array([0.0, 499.0]), np.array([10.0, 250.0])) == 0.25)


def test_sample_cell_center_uses_row_major_index():
    g = _grid()
    for i in range(4):
        for j in range(3):
            assert sample_field(g, (i + 0.5) * 10.0, (j + 0.5) * 10.0) == g.flat[j * 4 + i]


def test_sample_clamps_outside_east_edge():
    g = _grid()
    assert sample_field(g, 40.01, 15.0) == g.values[1, 3]
    assert sample_field(g, -5.0, -5.0) == g.values[0, 0]
    assert sample_field(g, 1e6, 1e6) == g.values[2, 3]


def test_sample_piecewise_constant():
    g = _grid()
    assert sample_field(g, 11.0, 21.0) == sample_field(g, 19.9, 29.9)


def test_grid_field_is_read_only():
    g = _grid()
    with pytest.raises(ValueError):
        g.values[0, 0] = 1.0


def test_cell_size_is_configurable():
    sc = generate_default_scenario(0, cell_size=50.0)
    assert sc.cell_size == 50.0
    assert np.allclose(sc.to_meters(sc.end), (2450.0, 2450.0))
