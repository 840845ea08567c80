import numpy as np
import pytest

from uavpp import operators as ops


def test_initialize_statistics_and_degenerate_gene():
    rng = np.random.default_rng(1)
    lb = np.array([0.0, -5.0, 3.0])
    ub = np.array([1.0, 5.0, 3.0])
    x = ops.initialize(10_000, lb, ub, rng)
    assert np.all(x[:, 2] == 3.0)
    for j in range(2):
        se = (ub[j] - lb[j]) / np.sqrt(12 * len(x))
        assert abs(x[:, j].mean() - 0.5 * (lb[j] + ub[j])) < 3 * se
    assert np.array_equal(ops.initialize(5, lb, ub, np.random.default_rng(3)), ops.initialize(5, lb, ub, np.random.default_rng(3)))


def test_sbx_examples():
    assert ops.sbx_from_draws(0.4, 0.6, 20.0, 0.0, 0.5) == pytest.approx(0.4)
    assert ops.sbx_from_draws(0.4, 0.6, 20.0, 0.99, 0.32, p_c=0.5) == 0.4
    d = 0.64 ** (1 / 21)
    assert d == pytest.approx(0.97897, abs=5e-6)
    assert ops.sbx_from_draws(0.4, 0.6, 20.0, 0.0, 0.32) == pytest.approx(0.402103, abs=5e-7)


def test_sbx_clamps():
    rng = np.random.default_rng(0)
    c = np.full((200, 4), 0.99)
    a = np.full((200, 4), 0.01)
    out = ops.sbx(c, a, 2.0, 1.0, rng, np.zeros(4), np.ones(4))
    assert np.all((out >= 0) & (out <= 1))


def test_sbx_pair_symmetric_children():
    rng = np.random.default_rng(4)
    p1, p2 = rng.random((10, 6)), rng.random((10, 6))
    c1, c2 = ops.sbx_pair(p1, p2, 20.0, 1.0, rng, -10 * np.ones(6), 10 * np.ones(6))
    assert np.allclose(c1 + c2, p1 + p2)


def test_de_examples():
    c = np.array([[0.5]])
    out = ops.de_from_draws(c, 0.6, 0.4, 0.7, 0.3, 0.9, 0.7, True, np.array([[0.0]]), 0)
    assert out[0, 0] == pytest.approx(0.92)
    same = ops.de_from_draws(np.array([[0.2, 0.3]]), 0.6, 0.6, 0.1, 0.1, 0.9, 0.7, True, np.zeros((1, 2)), 0)
    assert np.array_equal(same, [[0.2, 0.3]])
    keep = ops.de_from_draws(np.array([[0.2, 0.3]]), 0.9, 0.1, 0.0, 0.0, 0.5, 0.5, False, np.array([[0.9, 0.9]]), 1)
    assert keep[0, 0] == 0.2 and keep[0, 1] != 0.3


def test_de_variants_clamp_and_params():
    rng = np.random.default_rng(0)
    A = rng.random((20, 5))
    C = A[rng.integers(20, size=30)]
    out = ops.de_variants(C, A, rng.choice(ops.DE_VARIANTS, size=30), rng, np.zeros(5), np.ones(5))
    assert out.shape == C.shape and np.all((out >= 0) & (out <= 1))
    assert ops.DEFAULT_DE_PARAMS == {"DE1": (0.9, 0.7), "DE2": (0.5, 0.5), "DE3": (0.1, 0.5)}


def test_draw_distinct(caplog):
    rng = np.random.default_rng(0)
    idx = ops.draw_distinct(10, 50, 4, rng)
    assert all(len(set(r)) == 4 for r in idx.tolist())
    with caplog.at_level("WARNING"):
        small = ops.draw_distinct(2, 5, 4, rng)
    assert small.shape == (5, 4) and "replacement" in caplog.text


def test_pm_identity_and_clamp():
    rng = np.random.default_rng(0)
    x = rng.random((50, 8))
    assert np.array_equal(ops.polynomial_mutation(x, 20.0, 0.0, 0.0, 1.0, rng), x)
    at_lb = ops.pm_from_draws(np.zeros(5), 20.0, 1.0, 0.0, 1.0, np.zeros(5), np.full(5, 0.1))
    assert np.all(at_lb >= 0.0)


def test_pm_symmetric_mean():
    rng = np.random.default_rng(7)
    x = np.full(100_000, 0.5)
    y = ops.polynomial_mutation(x, 20.0, 1.0, 0.0, 1.0, rng)
    d = y - x
    assert abs(d.mean()) < 3 * d.std(ddof=1) / np.sqrt(len(d))
    assert np.all((y >= 0) & (y <= 1))


def test_adaptive_selection_probabilities():
    s = ops.StrategyStats()
    assert np.allclose(s.probabilities(), 1 / 3)
    s.record([10, 10, 10], [10, 0, 0])
    p = s.probabilities()
    assert p[0] / p[1] == pytest.approx(11.0) and p[1] == pytest.approx(p[2])
    assert p.sum() == pytest.approx(1.0)


def test_adaptive_window_forgets():
    s = ops.StrategyStats(window=5)
    s.record([10, 10, 10], [10, 0, 0])
    for _ in range(5):
        s.record([1, 1, 1], [0, 0, 0])
    assert np.allclose(s.probabilities(), 1 / 3)


def test_adaptive_select_draws_names():
    s = ops.StrategyStats()
    rng = np.random.default_rng(0)
    assert ops.adaptive_de_select(s, rng) in ops.DE_VARIANTS
    names = ops.adaptive_de_select(s, rng, size=3000)
    counts = [np.sum(names == v) for v in ops.DE_VARIANTS]
    assert all(abs(c - 1000) < 120 for c in counts)
