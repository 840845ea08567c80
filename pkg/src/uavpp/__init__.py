"""Biparty UAV path planning: city model, path objectives, multiparty sorting and immune optimisers."""

from .evolve import VARIANTS, AlgorithmConfig, RunResult, run_algorithm
from .kernels import backend
from .metrics import compute_bounds, hv_2d, mean_hv
from .objectives import evaluate_batch, evaluate_case
from .ranking import extract_mps, fast_nds, mpnds2
from .scenario import CityScenario, generate_default_scenario, load_scenario, save_scenario

__version__ = "0.1.0"

__all__ = [
    "VARIANTS",
    "AlgorithmConfig",
    "CityScenario",
    "RunResult",
    "backend",
    "compute_bounds",
    "evaluate_batch",
    "evaluate_case",
    "extract_mps",
    "fast_nds",
    "generate_default_scenario",
    "hv_2d",
    "load_scenario",
    "mean_hv",
    "mpnds2",
    "run_algorithm",
    "save_scenario",
]
