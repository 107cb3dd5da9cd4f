"""Kuzmin's geometric picture of the sum, built and checked numerically.

The partial sums A_0 = 0, A_m = e_1 + ... + e_m form a polygon with unit
steps.  Each consecutive triple A_{m-1}, A_m, A_{m+1} has a circumcenter C_m;
the turn at A_m is theta_m = 2*pi*d_m, so the circumradius is
1/(2 sin(pi d_m)) and consecutive centers sit on a common bisector at
distance (cot(pi d_m) - cot(pi d_{m+1}))/2 from each other.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .core import PhaseSequence, require_admissible, unit_terms, validate_theta
from .errors import DegenerateError, TooShortError
from .formats import fmt

SIN_THRESHOLD = 1e-12

CSV_HEADER = ("m", "A_re", "A_im", "M_re", "M_im", "C_re", "C_im", "theta_m", "R_m")


@dataclass(frozen=True, eq=False)
class ChainGeometry:
    phases: PhaseSequence
    partial_sums: np.ndarray  # complex, A_0 .. A_n
    midpoints: np.ndarray  # complex, M_1 .. M_n
    centers: np.ndarray  # complex, C_1 .. C_{n-1}
    turn_angles: np.ndarray  # radians, theta_1 .. theta_{n-1}
    radii: np.ndarray  # |A_m - C_m|
    residuals: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.phases.n


def build_chain(a: PhaseSequence) -> ChainGeometry:
    if a.n < 2:
        raise TooShortError("a chain needs at least two phases for one circumcenter")
    gaps = np.diff(a.phases)
    s = np.abs(np.sin(np.pi * gaps))
    if np.any(s < SIN_THRESHOLD):
        m = int(np.argmax(s < SIN_THRESHOLD)) + 1
        raise DegenerateError(
            f"A_{m - 1}, A_{m}, A_{m + 1} are collinear: gap d_{m} is too close to an integer"
        )
    re, im = unit_terms(a.phases)
    e = re + 1j * im
    A = np.empty(a.n + 1, dtype=complex)
    A[0] = 0.0
    A[1:] = np.cumsum(e)
    M = (A[:-1] + A[1:]) / 2.0

    # Bisectors of A_{m-1}A_m and A_mA_{m+1}: with x = C_m - A_m, u = e_m,
    # v = e_{m+1}: x.u = -1/2 and x.v = 1/2.  In the orthogonal basis
    # q = v - u, p = v + u this reads x.q = 1, x.p = 0, so x = q/|q|^2.
    # Unlike a general 2x2 solve this stays exact when the chain doubles
    # back (d_m = 1/2, v = -u).
    u = e[:-1]
    v = e[1:]
    q = v - u
    x = q / (np.abs(q) ** 2)
    C = A[1:-1] + x

    R = np.abs(A[1:-1] - C)
    r_prev = np.abs(A[:-2] - C)
    r_next = np.abs(A[2:] - C)
    equidistance = float(
        max(np.max(np.abs(R - r_prev)), np.max(np.abs(R - r_next)), np.max(np.abs(r_prev - r_next)))
    )
    unit_step = float(np.max(np.abs(np.abs(np.diff(A)) - 1.0)))
    g = ChainGeometry(
        phases=a,
        partial_sums=A,
        midpoints=M,
        centers=C,
        turn_angles=2.0 * np.pi * gaps,
        radii=R,
    )
    res = {"unit_step": unit_step, "equidistance": equidistance}
    res["radius"] = verify_radius_identity(g)
    res["spacing"] = verify_center_spacing(g) if a.n >= 3 else 0.0
    res["telescoping"] = verify_telescoping(g) if a.n >= 3 else 0.0
    object.__setattr__(g, "residuals", res)
    return g


def verify_radius_identity(g: ChainGeometry) -> float:
    """max_m | R_m - csc(theta_m / 2) / 2 |."""
    half = g.turn_angles / 2.0
    return float(np.max(np.abs(g.radii - 0.5 / np.abs(np.sin(half)))))


def center_cot_differences(g: ChainGeometry) -> np.ndarray:
    """(cot(theta_m/2) - cot(theta_{m+1}/2)) / 2 for m = 1 .. n-2."""
    c = np.cos(g.turn_angles / 2.0) / np.sin(g.turn_angles / 2.0)
    return 0.5 * (c[:-1] - c[1:])


def verify_center_spacing(g: ChainGeometry) -> float:
    """max_m | |C_{m+1} - C_m| - (cot(theta_m/2) - cot(theta_{m+1}/2))/2 |.

    Meaningful for non-decreasing gaps, where the cotangent difference is the
    unsigned distance.
    """
    if g.centers.size < 2:
        return 0.0
    dist = np.abs(np.diff(g.centers))
    return float(np.max(np.abs(dist - center_cot_differences(g))))


def verify_telescoping(g: ChainGeometry) -> float:
    """|(A_n - A_0) - [(A_n - C_{n-1}) + sum_{m=2}^{n-1} (C_m - C_{m-1}) + (C_1 - A_0)]|."""
    if g.n < 3:
        raise TooShortError("telescoping needs at least two circumcenters (n >= 3)")
    A, C = g.partial_sums, g.centers
    pieces = np.concatenate(([A[-1] - C[-1]], np.diff(C), [C[0] - A[0]]))
    total = complex(math.fsum(pieces.real), math.fsum(pieces.imag))
    return float(abs((A[-1] - A[0]) - total))


@dataclass(frozen=True)
class KuzminTrace:
    theta: float
    end_term: float  # |A_n - C_{n-1}|
    center_path: float  # sum |C_m - C_{m-1}|
    start_term: float  # |C_1 - A_0|
    total: float
    abs_sum: float
    closed_form: float
    kuzmin_bound: float
    lower_ok: bool
    upper_ok: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def kuzmin_bound_trace(g: ChainGeometry, theta: float) -> KuzminTrace:
    """Split the triangle-inequality bound on |A_n| into its three pieces.

    ``closed_form`` is (1 - cos x)/(2 sin x) + (1 + cos y)/(2 sin y) with
    x = theta_{n-1}/2 and y = theta_1/2; for monotone gaps it equals
    ``total`` and coincides with the refined bound of the arithmetic proof.
    """
    theta = validate_theta(theta)
    if g.n < 3:
        raise TooShortError("the bound trace needs n >= 3")
    require_admissible(g.phases, theta)
    A, C = g.partial_sums, g.centers
    end_term = float(abs(A[-1] - C[-1]))
    center_path = math.fsum(np.abs(np.diff(C)))
    start_term = float(abs(C[0] - A[0]))
    total = end_term + center_path + start_term
    x = g.turn_angles[-1] / 2.0
    y = g.turn_angles[0] / 2.0
    closed = (1.0 - math.cos(x)) / (2.0 * math.sin(x)) + (1.0 + math.cos(y)) / (2.0 * math.sin(y))
    abs_sum = float(abs(A[-1]))
    kuzmin = 2.0 / math.sin(math.pi * theta)
    return KuzminTrace(
        theta=theta,
        end_term=end_term,
        center_path=center_path,
        start_term=start_term,
        total=total,
        abs_sum=abs_sum,
        closed_form=closed,
        kuzmin_bound=kuzmin,
        lower_ok=abs_sum <= total + 1e-9,
        upper_ok=total <= kuzmin + 1e-9,
    )


def chain_csv(g: ChainGeometry) -> str:
    """One row per m = 0..n; columns that do not exist at m are left empty."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    n = g.n
    for m in range(n + 1):
        A = g.partial_sums[m]
        row = [m, fmt(A.real), fmt(A.imag)]
        row += [fmt(g.midpoints[m - 1].real), fmt(g.midpoints[m - 1].imag)] if m >= 1 else ["", ""]
        if 1 <= m <= n - 1:
            c = g.centers[m - 1]
            row += [fmt(c.real), fmt(c.imag), fmt(g.turn_angles[m - 1]), fmt(g.radii[m - 1])]
        else:
            row += ["", "", "", ""]
        w.writerow(row)
    return buf.getvalue()


def chain_svg(g: ChainGeometry, circles: bool = False, size: int = 1000, margin: float = 0.05) -> str:
    """Deterministic SVG of the chain: polyline, centers as crosses, optional circles.

    The drawing is scaled uniformly into a size x size viewBox leaving
    ``margin`` of the size on every side; y points up.
    """
    A, C = g.partial_sums, g.centers
    xs = [A.real, C.real]
    ys = [A.imag, C.imag]
    if circles:
        xs += [C.real - g.radii, C.real + g.radii]
        ys += [C.imag - g.radii, C.imag + g.radii]
    x_all, y_all = np.concatenate(xs), np.concatenate(ys)
    xmin, xmax = float(x_all.min()), float(x_all.max())
    ymin, ymax = float(y_all.min()), float(y_all.max())
    span = max(xmax - xmin, ymax - ymin, 1e-12)
    inner = size * (1.0 - 2.0 * margin)
    k = inner / span
    ox = size * margin + (inner - (xmax - xmin) * k) / 2.0
    oy = size * margin + (inner - (ymax - ymin) * k) / 2.0

    def tx(z: complex) -> tuple[str, str]:
        x = ox + (z.real - xmin) * k
        y = size - (oy + (z.imag - ymin) * k)
        return f"{x:.3f}", f"{y:.3f}"

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" '
        f'width="{size}" height="{size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
    ]
    if circles:
        for c, r in zip(C, g.radii):
            cx, cy = tx(c)
            lines.append(
                f'<circle cx="{cx}" cy="{cy}" r="{r * k:.3f}" fill="none" '
                f'stroke="#bbbbbb" stroke-width="1"/>'
            )
    pts = " ".join(",".join(tx(z)) for z in A)
    lines.append(f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="2"/>')
    for c in C:
        cx, cy = (float(v) for v in tx(c))
        lines.append(
            f'<path d="M{cx - 3:.3f},{cy:.3f}H{cx + 3:.3f}M{cx:.3f},{cy - 3:.3f}V{cy + 3:.3f}" '
            f'stroke="red" stroke-width="1"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
