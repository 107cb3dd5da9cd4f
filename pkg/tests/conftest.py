import math

import mpmath
import numpy as np
import pytest

from expsum import random_admissible

mpmath.mp.dps = 40


def mp_exp_sum(phases) -> complex:
    """Independent oracle: the sum evaluated in 40-digit arithmetic."""
    s = mpmath.fsum(mpmath.expjpi(2 * mpmath.mpf(float(a))) for a in phases)
    return complex(s)


def brute_circumcenter(p0: complex, p1: complex, p2: complex) -> complex:
    """Determinant formula for the circumcenter, evaluated in mpmath."""
    ax, ay = mpmath.mpf(p0.real), mpmath.mpf(p0.imag)
    bx, by = mpmath.mpf(p1.real), mpmath.mpf(p1.imag)
    cx, cy = mpmath.mpf(p2.real), mpmath.mpf(p2.imag)
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay) + (cx**2 + cy**2) * (ay - by)) / d
    uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx) + (cx**2 + cy**2) * (bx - ax)) / d
    return complex(ux, uy)


def random_cases(seed, count, n_max, theta_lo=0.01, theta_hi=0.5, n_min=1):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        theta = float(rng.uniform(theta_lo, theta_hi))
        n = int(rng.integers(n_min, n_max + 1))
        yield theta, random_admissible(rng, n, theta)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def landau(theta):
    return math.cos(math.pi * theta / 2) / math.sin(math.pi * theta / 2)


def minmax_isotonic_projection(y, theta):
    """Brute-force projection onto {theta <= x_1 <= ... <= x_m <= 1 - theta}.

    Isotonic part by the min-max formula over all interval means,
    x_i = max_{j<=i} min_{k>=i} mean(y_j..y_k), then clipped to the box.
    O(m^3) and unrelated to pool-adjacent-violators.
    """
    y = [float(v) for v in y]
    m = len(y)
    out = np.empty(m)
    for i in range(m):
        best = -math.inf
        for j in range(i + 1):
            inner = min(math.fsum(y[j:k + 1]) / (k + 1 - j) for k in range(i, m))
            best = max(best, inner)
        out[i] = min(max(best, theta), 1.0 - theta)
    return out


def projection_kkt_residual(x, y, theta, tol=1e-12):
    """Largest KKT violation of x as the projection of y onto the ordered box.

    With g = x - y and G_k = g_1 + ... + g_k, stationarity forces the chain
    multipliers to be nu_k = nu_0 - G_k (nu_0 for x_1 >= theta, nu_m for
    x_m <= 1 - theta).  nu_0 is pinned to 0 unless x_1 sits on theta; every
    nu must be >= 0 and vanish where its constraint is slack.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    m = x.size
    G = np.cumsum(x - y)
    worst = max(0.0, theta - x[0], x[-1] - (1.0 - theta), float(np.max(x[:-1] - x[1:], initial=0.0)))
    at_lo = abs(x[0] - theta) <= tol
    nu0 = max(0.0, float(np.max(G))) if at_lo else 0.0
    nu = nu0 - G  # nu[k-1] is the multiplier of constraint k (k = 1..m)
    worst = max(worst, float(np.max(-nu)))
    for k in range(1, m):
        if x[k] - x[k - 1] > tol:
            worst = max(worst, abs(nu[k - 1]))
    if (1.0 - theta) - x[-1] > tol:
        worst = max(worst, abs(nu[-1]))
    return worst


_QP_CACHE = {}


def _qp(m):
    import cvxpy as cp

    if m not in _QP_CACHE:
        y = cp.Parameter(m)
        lo = cp.Parameter()
        hi = cp.Parameter()
        x = cp.Variable(m)
        cons = [x >= lo, x <= hi]
        if m > 1:
            cons.append(cp.diff(x) >= 0)
        prob = cp.Problem(cp.Minimize(cp.sum_squares(x - y)), cons)
        _QP_CACHE[m] = (prob, x, y, lo, hi)
    return _QP_CACHE[m]


def qp_projection(y, theta):
    """The same projection from a generic QP solver; accurate to about 1e-4 only."""
    y = np.asarray(y, dtype=float)
    m = y.size
    prob, x, yp, lo, hi = _qp(m)
    yp.value, lo.value, hi.value = y, theta, 1.0 - theta
    prob.solve(solver="CLARABEL")
    return np.asarray(x.value, dtype=float)


# acceptance criteria report: number -> (passed, detail)
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
