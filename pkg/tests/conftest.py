import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from uavpp.geometry import N_WAYPOINTS, bounds, decode_batch, violations_batch  # noqa: E402
from uavpp.scenario import generate_default_scenario  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def scenario():
    return generate_default_scenario(0)


def feasible_genomes(scenario, n, rng):
    """Smooth random genomes that satisfy every constraint (rejection sampled)."""
    lb, ub = bounds(scenario)
    t = np.arange(1, N_WAYPOINTS + 1) / (N_WAYPOINTS + 1)
    out = []
    while len(out) < n:
        k = rng.integers(1, 4)
        amp = rng.uniform(-1, 1, size=k) * scenario.max_offset / k
        offs = sum(a * np.sin((j + 1) * np.pi * t) for j, a in enumerate(amp))
        alts = rng.uniform(scenario.h_min, scenario.h_max, size=N_WAYPOINTS)
        g = np.clip(np.concatenate([offs, alts]), lb, ub)
        if violations_batch(decode_batch(g, scenario), scenario)[0, 3] == 0.0:
            out.append(g)
    return np.array(out)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
