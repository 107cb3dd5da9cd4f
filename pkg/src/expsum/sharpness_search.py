"""Projected gradient ascent of |S|^2 over admissible gap profiles.

The search works in gap coordinates (a_1 fixed to 0), where the feasible set
{theta <= d_1 <= ... <= d_{n-1} <= 1 - theta} is an ordered box and the
Euclidean projection is isotonic regression followed by clipping.  Every
iterate is realized on a dyadic grid so its float phases pass the exact
admissibility check.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import isotonic_regression

from .core import (
    PhaseSequence,
    dyadic_gap_bounds,
    landau_bound,
    phases_from_gaps,
    validate_theta,
    _grid_exponent,
)
from .errors import InvalidParameterError

ARMIJO_C = 1e-4


@dataclass(frozen=True)
class SearchConfig:
    n: int
    theta: float
    restarts: int = 32
    max_iters: int = 5000
    step_init: float = 0.1
    tol: float = 1e-10
    seed: int = 0
    seed_construction: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParameterError("n must be at least 2")
        validate_theta(self.theta)
        for name in ("restarts", "max_iters", "workers"):
            if getattr(self, name) < 1:
                raise InvalidParameterError(f"{name} must be positive")
        if not (self.step_init > 0 and self.tol > 0):
            raise InvalidParameterError("step_init and tol must be positive")


@dataclass(frozen=True)
class RestartSummary:
    index: int
    start: str  # "random" or "construction"
    abs_sum: float
    iterations: int
    converged: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class SearchResult:
    config: SearchConfig
    best_sequence: PhaseSequence
    best_abs_sum: float
    target: float
    gap_to_target: float
    iterations_used: int
    restarts_used: int
    converged: bool
    best_restart: int
    restarts: tuple[RestartSummary, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "n": self.config.n,
            "theta": self.config.theta,
            "seed": self.config.seed,
            "best_phases": self.best_sequence.phases.tolist(),
            "best_abs_sum": self.best_abs_sum,
            "target": self.target,
            "gap_to_target": self.gap_to_target,
            "iterations_used": self.iterations_used,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "best_restart": self.best_restart,
            "restarts": [r.to_dict() for r in self.restarts],
        }


def objective_and_gradient(a1: float, gaps: Sequence[float]) -> tuple[float, np.ndarray]:
    """|S|^2 and its gradient with respect to (a1, d_1, ..., d_{n-1}).

    d|S|^2/da_k = -4*pi*Im(conj(S) e_k); a gap d_j moves every a_k with
    k > j, so its partial is the tail sum of the phase partials.
    """
    g = np.asarray(gaps, dtype=float)
    if g.size == 0:
        return 1.0, np.zeros(1)
    phases = np.empty(g.size + 1)
    phases[0] = a1
    phases[1:] = a1 + np.cumsum(g)
    angle = 2.0 * np.pi * (phases - np.rint(phases))
    e = np.cos(angle) + 1j * np.sin(angle)
    s = e.sum()
    value = float(s.real**2 + s.imag**2)
    d_phase = -4.0 * np.pi * np.imag(np.conj(s) * e)
    tail = np.cumsum(d_phase[::-1])[::-1]
    grad = np.empty(g.size + 1)
    grad[0] = tail[0]
    grad[1:] = tail[1:]
    return value, grad


def project_admissible(gaps: Sequence[float], theta: float) -> np.ndarray:
    """Euclidean projection onto {theta <= d_1 <= ... <= d_m <= 1 - theta}.

    Isotonic regression (pool adjacent violators) then clipping; clipping
    preserves order, and for an ordered box this composition is the exact
    projection.  Feasible input is returned unchanged, which makes the map
    idempotent bit for bit (re-pooling a tied block can move it by an ulp).
    """
    theta = validate_theta(theta)
    y = np.asarray(gaps, dtype=float)
    if y.size == 0:
        return y.copy()
    if np.all(np.diff(y) >= 0) and y[0] >= theta and y[-1] <= 1.0 - theta:
        return y.copy()
    # block means can come out an ulp out of order; the running max fixes that
    iso = np.maximum.accumulate(isotonic_regression(y).x)
    return np.clip(iso, theta, 1.0 - theta)


def _realize(gaps: np.ndarray, theta: float) -> np.ndarray:
    """Snap projected gaps to the dyadic grid used by :func:`phases_from_gaps`."""
    n = gaps.size + 1
    scale = 2.0 ** _grid_exponent(n)
    lo, hi = dyadic_gap_bounds(theta, n)
    return np.clip(np.rint(gaps * scale) / scale, lo, hi)


def _value(gaps: np.ndarray) -> float:
    return objective_and_gradient(0.0, gaps)[0]


def _ascend(x: np.ndarray, theta: float, cfg: SearchConfig,
            on_iterate: Optional[Callable[[np.ndarray], None]] = None):
    """Projected gradient ascent with Armijo backtracking from feasible x."""
    f = _value(x)
    step = cfg.step_init
    it = 0
    converged = False
    while it < cfg.max_iters:
        it += 1
        _, grad = objective_and_gradient(0.0, x)
        g = grad[1:]
        accepted = False
        while step >= cfg.tol:
            y = _realize(project_admissible(x + step * g, theta), theta)
            d = y - x
            fy = _value(y)
            if fy >= f + ARMIJO_C * float(g @ d) and fy >= f:
                accepted = True
                break
            step /= 2.0
        if not accepted:
            converged = True
            break
        moved = float(np.linalg.norm(d))
        x, f = y, fy
        if on_iterate is not None:
            on_iterate(x)
        if moved < cfg.tol:
            converged = True
            break
        step = min(step * 2.0, 1e3)
    return x, f, it, converged


def construction_seed(n: int, theta: float) -> Optional[np.ndarray]:
    """Gap profile built from the odd/odd construction, fitted to n phases.

    Candidates are theta' = p/q odd/odd with theta <= theta' < 1/2 and
    q <= n (and theta' = theta itself when feasible); each profile is
    k gaps of theta' followed by n-1-k gaps of 1 - theta', and the split
    and theta' with the largest |S| win.  None if nothing fits.
    """
    cands = set()
    for q in range(3, n + 1, 2):
        p = math.ceil(theta * q)
        if p % 2 == 0:
            p += 1
        if Fraction(p, q) < Fraction(1, 2) and p / q >= theta:
            cands.add(Fraction(p, q))
    if not cands:
        return None
    best, best_val = None, -1.0
    m = n - 1
    for t in sorted(cands):
        tf = float(t)
        for k in range(1, m):
            gaps = np.array([tf] * k + [1.0 - tf] * (m - k))
            x = _realize(gaps, theta)
            v = _value(x)
            if v > best_val:
                best, best_val = x, v
    return best


def _restart_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _run_restart(cfg: SearchConfig, index: int, seed_gaps: Optional[np.ndarray],
                 on_iterate=None) -> tuple[RestartSummary, np.ndarray, float]:
    if seed_gaps is not None and index == 0:
        x0, kind = seed_gaps, "construction"
    else:
        rng = _restart_rng(cfg.seed, index)
        x0 = np.sort(rng.uniform(cfg.theta, 1.0 - cfg.theta, cfg.n - 1))
        kind = "random"
    x0 = _realize(project_admissible(x0, cfg.theta), cfg.theta)
    x, f, it, conv = _ascend(x0, cfg.theta, cfg, on_iterate)
    return RestartSummary(index, kind, math.sqrt(f), it, conv), x, f


def maximize(cfg: SearchConfig, on_iterate: Optional[Callable[[np.ndarray], None]] = None) -> SearchResult:
    """Multi-start projected gradient ascent; the best restart wins.

    Restart r draws its start from ``default_rng([seed, r])``, so results
    do not depend on how restarts are scheduled.  With
    ``seed_construction`` the first restart starts from
    :func:`construction_seed` instead.  ``on_iterate`` receives every
    accepted iterate's gap vector (it forces sequential execution).
    """
    theta = cfg.theta
    seed_gaps = construction_seed(cfg.n, theta) if cfg.seed_construction and theta < 0.5 else None
    indices = range(cfg.restarts)
    if cfg.workers > 1 and on_iterate is None:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            runs = list(pool.map(lambda r: _run_restart(cfg, r, seed_gaps), indices))
    else:
        runs = [_run_restart(cfg, r, seed_gaps, on_iterate) for r in indices]

    best_i = 0
    for i, (_, _, f) in enumerate(runs):
        if f > runs[best_i][2]:
            best_i = i
    summary, x, f = runs[best_i]
    target = landau_bound(theta)
    best_abs = math.sqrt(f)
    return SearchResult(
        config=cfg,
        best_sequence=phases_from_gaps(x, theta),
        best_abs_sum=best_abs,
        target=target,
        gap_to_target=target - best_abs,
        iterations_used=sum(r[0].iterations for r in runs),
        restarts_used=len(runs),
        converged=summary.converged,
        best_restart=best_i,
        restarts=tuple(r[0] for r in runs),
    )


def default_seed() -> int:
    """EXPSUM_SEED if set, else 0."""
    return int(os.environ.get("EXPSUM_SEED", "0"))
