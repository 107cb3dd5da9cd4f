import math

import numpy as np
import pytest

from expsum import (
    InvalidParameterError,
    SearchConfig,
    check_admissible,
    maximize,
    objective_and_gradient,
    phases_from_gaps,
    project_admissible,
)
from expsum.sharpness_search import construction_seed, default_seed

from conftest import landau, minmax_isotonic_projection, projection_kkt_residual, qp_projection


def finite_difference(a1, gaps, h=1e-6):
    x = np.concatenate(([a1], gaps))
    out = np.empty_like(x)
    for i in range(x.size):
        up, dn = x.copy(), x.copy()
        up[i] += h
        dn[i] -= h
        out[i] = (objective_and_gradient(up[0], up[1:])[0] - objective_and_gradient(dn[0], dn[1:])[0]) / (2 * h)
    return out


class TestGradient:
    def test_single_phase(self):
        v, g = objective_and_gradient(0.37, [])
        assert v == pytest.approx(1.0, abs=1e-15)
        assert g.tolist() == [0.0]

    def test_value(self):
        v, _ = objective_and_gradient(0.0, [1 / 3, 2 / 3])
        assert v == pytest.approx(3.0, abs=1e-12)

    def test_a1_partial_vanishes(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            n = int(rng.integers(1, 40))
            _, g = objective_and_gradient(float(rng.uniform(-5, 5)), rng.uniform(0.01, 0.99, n - 1))
            assert abs(g[0]) < 1e-10 * max(1, n * n)

    def test_finite_differences(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            gaps = rng.uniform(0.05, 0.95, 19)
            a1 = float(rng.uniform(0, 1))
            _, g = objective_and_gradient(a1, gaps)
            fd = finite_difference(a1, gaps)
            scale = max(np.max(np.abs(fd)), 1.0)
            assert np.max(np.abs(g - fd)) / scale <= 1e-6


class TestProjection:
    def test_examples(self):
        assert np.allclose(project_admissible([0.3, 0.2], 0.1), [0.25, 0.25], atol=1e-15)
        assert np.allclose(project_admissible([0.05, 0.9, 0.95], 0.1), [0.1, 0.9, 0.9], atol=1e-15)

    def test_feasible_unchanged(self):
        y = np.array([0.2, 0.3, 0.3, 0.7])
        assert np.array_equal(project_admissible(y, 0.2), y)

    def test_empty(self):
        assert project_admissible([], 0.3).size == 0

    def test_idempotent_and_feasible(self):
        rng = np.random.default_rng(43)
        for _ in range(500):
            theta = float(rng.uniform(0.01, 0.5))
            y = rng.normal(0.5, 0.5, int(rng.integers(1, 30)))
            p = project_admissible(y, theta)
            assert np.all(np.diff(p) >= 0)
            assert np.all(p >= theta) and np.all(p <= 1 - theta)
            assert np.array_equal(project_admissible(p, theta), p)

    def test_against_qp_oracle(self):
        rng = np.random.default_rng(44)
        for _ in range(1000):
            m = int(rng.integers(1, 20))
            theta = float(rng.uniform(0.01, 0.5))
            y = rng.normal(0.5, 0.4, m)
            p = project_admissible(y, theta)
            assert np.linalg.norm(p - minmax_isotonic_projection(y, theta)) <= 1e-8
            assert projection_kkt_residual(p, y, theta) <= 1e-12

    def test_against_generic_qp_solver(self):
        rng = np.random.default_rng(46)
        for _ in range(200):
            m = int(rng.integers(1, 20))
            theta = float(rng.uniform(0.01, 0.5))
            y = rng.normal(0.5, 0.4, m)
            assert np.linalg.norm(project_admissible(y, theta) - qp_projection(y, theta)) <= 1e-3

    def test_kkt_detects_wrong_answer(self):
        y = np.array([0.3, 0.2])
        assert projection_kkt_residual([0.25, 0.25], y, 0.1) <= 1e-15
        assert projection_kkt_residual([0.2, 0.3], y, 0.1) > 1e-3
        assert projection_kkt_residual([0.24, 0.24], y, 0.1) > 1e-3

    def test_bad_theta(self):
        with pytest.raises(InvalidParameterError):
            project_admissible([0.4], 0.6)


class TestConfig:
    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            SearchConfig(n=1, theta=0.3)
        with pytest.raises(InvalidParameterError):
            SearchConfig(n=5, theta=0.3, restarts=0)
        with pytest.raises(InvalidParameterError):
            SearchConfig(n=5, theta=0.3, tol=0)
        with pytest.raises(InvalidParameterError):
            SearchConfig(n=5, theta=0.7)

    def test_default_seed(self, monkeypatch):
        monkeypatch.delenv("EXPSUM_SEED", raising=False)
        assert default_seed() == 0
        monkeypatch.setenv("EXPSUM_SEED", "17")
        assert default_seed() == 17


class TestMaximize:
    def test_third(self):
        r = maximize(SearchConfig(n=3, theta=1 / 3, restarts=8))
        assert abs(r.best_abs_sum - math.sqrt(3)) <= 1e-6
        assert r.best_abs_sum <= r.target + 1e-9

    def test_third_without_seed(self):
        r = maximize(SearchConfig(n=3, theta=1 / 3, restarts=8, seed_construction=False))
        assert abs(r.best_abs_sum - math.sqrt(3)) <= 1e-6

    @pytest.mark.parametrize("n", [3, 5, 9])
    def test_half(self, n):
        r = maximize(SearchConfig(n=n, theta=0.5, restarts=4))
        assert 1 - 1e-6 <= r.best_abs_sum <= 1 + 1e-9

    def test_theta_03_n47(self):
        r = maximize(SearchConfig(n=47, theta=0.3))
        assert r.best_abs_sum >= landau(0.3) - 0.05
        assert r.best_abs_sum <= r.target + 1e-9
        assert r.restarts_used == 32
        assert check_admissible(r.best_sequence, 0.3).admissible

    def test_iterates_admissible_and_ascending(self):
        for n, theta in [(12, 0.2), (25, 0.37), (7, 0.11)]:
            cfg = SearchConfig(n=n, theta=theta, restarts=3, max_iters=300)
            seen = []
            maximize(cfg, on_iterate=lambda x: seen.append(x.copy()))
            assert seen
            for x in seen:
                assert check_admissible(phases_from_gaps(x), theta).admissible
                assert math.sqrt(objective_and_gradient(0.0, x)[0]) <= landau(theta) + 1e-9

    def test_never_exceeds_bound(self):
        rng = np.random.default_rng(45)
        for _ in range(15):
            n = int(rng.integers(2, 30))
            theta = float(rng.uniform(0.05, 0.5))
            r = maximize(SearchConfig(n=n, theta=theta, restarts=3, max_iters=500))
            assert r.best_abs_sum <= landau(theta) + 1e-9
            assert check_admissible(r.best_sequence, theta).admissible
            assert r.gap_to_target == pytest.approx(r.target - r.best_abs_sum)

    def test_deterministic(self):
        cfg = SearchConfig(n=15, theta=0.23, restarts=6, max_iters=400, seed=5)
        a, b = maximize(cfg), maximize(cfg)
        assert a.to_dict() == b.to_dict()

    def test_workers_do_not_change_result(self):
        base = dict(n=15, theta=0.23, restarts=6, max_iters=400, seed=5)
        a = maximize(SearchConfig(**base, workers=1))
        b = maximize(SearchConfig(**base, workers=4))
        assert a.to_dict() == b.to_dict()

    def test_seed_matters(self):
        base = dict(n=15, theta=0.23, restarts=2, max_iters=50, seed_construction=False)
        a = maximize(SearchConfig(**base, seed=1))
        b = maximize(SearchConfig(**base, seed=2))
        assert a.restarts[0].abs_sum != b.restarts[0].abs_sum

    def test_construction_seed(self):
        x = construction_seed(47, 0.3)
        assert x is not None and np.all(np.diff(x) >= 0)
        seeded = math.sqrt(objective_and_gradient(0.0, x)[0])
        r = maximize(SearchConfig(n=47, theta=0.3, restarts=1))
        assert r.restarts[0].start == "construction"
        assert r.best_abs_sum >= seeded
        assert construction_seed(3, 0.45) is None
