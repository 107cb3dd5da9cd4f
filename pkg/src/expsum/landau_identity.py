"""Landau's arithmetic form of the bound.

With b_k = pi*(a_k - a_{k-1}) and e_k = exp(2*pi*i*a_k) the sum regroups as

    e_1 * i*exp(-i b_2) / (2 sin b_2)
    - (i/2) * sum_{k=2}^{n-1} e_k (cot b_k - cot b_{k+1})
    - e_n * i*exp(i b_n) / (2 sin b_n)

which is an algebraic identity for any strictly increasing phases with no
gap at an integer.  Taking absolute values term by term gives the refined
bound, which needs non-decreasing gaps so the cotangent differences are
non-negative.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .core import PhaseSequence, exp_sum, unit_terms
from .formats import fmt
from .errors import DegenerateError, NonMonotoneGapsError, TooShortError

SIN_THRESHOLD = 1e-12

CSV_HEADER = ("k", "b_k", "cot_b_k", "middle_re", "middle_im")


def _fsum_complex(z: np.ndarray) -> complex:
    return complex(math.fsum(z.real), math.fsum(z.imag))


@dataclass(frozen=True, eq=False)
class LandauDecomposition:
    b: np.ndarray  # b_2 ... b_n
    head: complex
    middle: np.ndarray  # k = 2 ... n-1
    tail: complex
    reconstruction: complex
    direct: complex
    residual: float

    @property
    def n(self) -> int:
        return self.b.size + 1

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "head_re": self.head.real,
            "head_im": self.head.imag,
            "tail_re": self.tail.real,
            "tail_im": self.tail.imag,
            "reconstruction_re": self.reconstruction.real,
            "reconstruction_im": self.reconstruction.imag,
            "sum_re": self.direct.real,
            "sum_im": self.direct.imag,
            "residual": self.residual,
        }


def _b_values(a: PhaseSequence) -> np.ndarray:
    if a.n < 2:
        raise TooShortError("the decomposition needs at least two phases")
    b = np.pi * np.diff(a.phases)
    s = np.abs(np.sin(b))
    if np.any(s < SIN_THRESHOLD):
        k = int(np.argmax(s < SIN_THRESHOLD)) + 2
        raise DegenerateError(f"sin b_{k} is below {SIN_THRESHOLD:g}")
    return b


def landau_decompose(a: PhaseSequence) -> LandauDecomposition:
    b = _b_values(a)
    re, im = unit_terms(a.phases)
    e = re + 1j * im
    sin_b = np.sin(b)
    cot_b = np.cos(b) / sin_b

    head = complex(e[0] * 1j * np.exp(-1j * b[0]) / (2.0 * sin_b[0]))
    middle = -0.5j * e[1:-1] * (cot_b[:-1] - cot_b[1:])
    tail = complex(-e[-1] * 1j * np.exp(1j * b[-1]) / (2.0 * sin_b[-1]))

    parts = np.concatenate(([head], middle, [tail]))
    reconstruction = _fsum_complex(parts)
    direct = exp_sum(a)
    return LandauDecomposition(
        b=b,
        head=head,
        middle=middle,
        tail=tail,
        reconstruction=reconstruction,
        direct=direct,
        residual=abs(reconstruction - direct),
    )


def verify_shift_identity(a: PhaseSequence) -> float:
    """max_k |e_k exp(-i b_k) - e_{k-1} exp(i b_k)|; holds for any real phases."""
    if a.n < 2:
        raise TooShortError("the shift identity needs at least two phases")
    d = np.diff(a.phases)
    # exp(i*pi*d) has period 2 in d; the reduction is exact
    b = np.pi * (d - 2.0 * np.rint(d / 2.0))
    re, im = unit_terms(a.phases)
    e = re + 1j * im
    lhs = e[1:] * np.exp(-1j * b)
    rhs = e[:-1] * np.exp(1j * b)
    return float(np.max(np.abs(lhs - rhs)))


def verify_halfturn_identities(b: float) -> tuple[float, float]:
    """Residuals of the two scalar identities behind the regrouping step.

    1 + i e^{ib}/(2 sin b) = i e^{-ib}/(2 sin b)
    1/2 + i e^{ib}/(2 sin b) = -cos b / (2 i sin b)
    """
    s = math.sin(b)
    if abs(s) < SIN_THRESHOLD:
        raise DegenerateError(f"sin b is below {SIN_THRESHOLD:g} at b={b!r}")
    z = 1j * complex(math.cos(b), s) / (2.0 * s)
    r1 = abs((1.0 + z) - 1j * complex(math.cos(b), -s) / (2.0 * s))
    r2 = abs((0.5 + z) - (-math.cos(b) / (2j * s)))
    return r1, r2


def refined_bound(a: PhaseSequence) -> float:
    """(1 + cos b_2)/(2 sin b_2) + (1 - cos b_n)/(2 sin b_n)."""
    b = _b_values(a)
    gaps = np.diff(a.phases)
    if np.any(gaps[1:] < gaps[:-1]):
        raise NonMonotoneGapsError("refined bound requires non-decreasing gaps")
    b2, bn = float(b[0]), float(b[-1])
    return (1.0 + math.cos(b2)) / (2.0 * math.sin(b2)) + (1.0 - math.cos(bn)) / (
        2.0 * math.sin(bn)
    )


def decomposition_csv(dec: LandauDecomposition) -> str:
    """One row per k = 2..n; middle columns are empty for k = n."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    cot_b = np.cos(dec.b) / np.sin(dec.b)
    for j, bk in enumerate(dec.b):
        k = j + 2
        if j < dec.middle.size:
            mid = (fmt(dec.middle[j].real), fmt(dec.middle[j].imag))
        else:
            mid = ("", "")
        w.writerow((k, fmt(bk), fmt(cot_b[j]), *mid))
    return buf.getvalue()
