"""Bound-attaining and near-attaining sequences, and the false-bound refutation.

For theta = (2M+1)/(2N+1) < 1/2 the sequence

    a_k = k*theta                      0 <= k <= N-1
    a_k = N*theta + (k-N)*(1-theta)    N <= k <= 2N

(indexed from 0, 2N+1 phases) has |S| = cot(pi*theta/2) exactly; for
theta = 1/2 the three phases 0, 1/2, 1 give |S| = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .core import (
    PhaseSequence,
    check_admissible,
    exp_sum,
    landau_bound,
    require_admissible,
    validate_theta,
)
from .errors import (
    InvalidFractionError,
    InvalidIntervalError,
    InvalidParameterError,
    NoCounterexampleError,
)

ATTAIN_TOL = 1e-9


@dataclass(frozen=True)
class OddFraction:
    """(2M+1)/(2N+1), not necessarily in lowest terms."""

    M: int
    N: int

    def __post_init__(self):
        if self.M < 0 or self.N < 1:
            raise InvalidFractionError(f"need M >= 0 and N >= 1, got M={self.M}, N={self.N}")

    @property
    def numerator(self) -> int:
        return 2 * self.M + 1

    @property
    def denominator(self) -> int:
        return 2 * self.N + 1

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def value(self) -> float:
        return self.numerator / self.denominator

    @classmethod
    def from_fraction(cls, f: Fraction | str) -> "OddFraction":
        """From an exact fraction; lowest terms of an odd/odd ratio stay odd/odd."""
        if isinstance(f, str):
            p, q = _split_ratio(f)
        else:
            f = Fraction(f)
            p, q = f.numerator, f.denominator
        if p <= 0 or q <= 0 or p % 2 == 0 or q % 2 == 0:
            raise InvalidFractionError(f"{p}/{q} is not a positive odd/odd fraction")
        return cls((p - 1) // 2, (q - 1) // 2)

    def canonical(self) -> "OddFraction":
        f = self.fraction
        return OddFraction((f.numerator - 1) // 2, (f.denominator - 1) // 2)

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"


def _split_ratio(text: str) -> tuple[int, int]:
    try:
        p, q = text.split("/")
        return int(p), int(q)
    except ValueError:
        raise InvalidFractionError(f"expected P/Q, got {text!r}") from None


@dataclass(frozen=True)
class ExtremalWitness:
    theta: float
    sequence: PhaseSequence
    abs_sum: float
    target: float
    attained: bool
    theta_prime: Optional[Fraction] = None
    exact_theta: Optional[Fraction] = None

    @property
    def margin(self) -> float:
        return self.abs_sum - self.target

    def to_dict(self) -> dict:
        d = {"theta": self.theta}
        if self.theta_prime is not None:
            d["theta_prime"] = float(self.theta_prime)
            d["theta_prime_fraction"] = f"{self.theta_prime.numerator}/{self.theta_prime.denominator}"
        d.update(
            phases=self.sequence.phases.tolist(),
            abs_sum=self.abs_sum,
            target=self.target,
            attained=self.attained,
            margin=self.margin,
        )
        return d


# -- exact rationals to admissible floats -----------------------------------


def _grid_gaps(theta: float, N: int) -> tuple[float, float]:
    """theta rounded up and 1 - theta rounded down to a dyadic grid.

    Phases of the construction stay below N + 1; the grid 2**-k with
    N + 1 <= 2**(53 - k) keeps every partial sum exactly representable, so
    float differences of the phases reproduce the two gap values bit for bit.
    """
    k = 53 - max(1, math.ceil(math.log2(N + 1)))
    scale = 2.0**k
    g1 = math.ceil(theta * scale) / scale
    g2 = math.floor((1.0 - theta) * scale) / scale
    return g1, g2


def extremal_sequence(f: OddFraction) -> ExtremalWitness:
    f = f.canonical()
    theta_exact = f.fraction
    if not (0 < theta_exact < Fraction(1, 2)):
        raise InvalidFractionError(f"{f} is not in (0, 1/2)")
    theta = float(theta_exact)
    g1, g2 = _grid_gaps(theta, f.N)
    gaps = np.array([g1] * f.N + [g2] * f.N)
    seq = PhaseSequence(np.concatenate(([0.0], np.cumsum(gaps))))
    require_admissible(seq, theta)
    abs_s = abs(exp_sum(seq))
    target = landau_bound(theta)
    return ExtremalWitness(
        theta=theta,
        sequence=seq,
        abs_sum=abs_s,
        target=target,
        attained=abs(abs_s - target) <= ATTAIN_TOL,
        exact_theta=theta_exact,
    )


def extremal_half() -> ExtremalWitness:
    seq = PhaseSequence([0.0, 0.5, 1.0])
    abs_s = abs(exp_sum(seq))
    target = landau_bound(0.5)
    return ExtremalWitness(
        theta=0.5,
        sequence=seq,
        abs_sum=abs_s,
        target=target,
        attained=abs(abs_s - target) <= ATTAIN_TOL,
        exact_theta=Fraction(1, 2),
    )


def closed_form_value(theta: float) -> float:
    """(1 + cos pi*theta) / sin pi*theta, the value attained by the construction."""
    x = math.pi * theta
    return (1.0 + math.cos(x)) / math.sin(x)


def odd_fraction_in(lo: float, hi: float, closed_hi: bool = False) -> OddFraction:
    """Odd/odd fraction in (lo, hi) with the smallest odd denominator.

    Ties go to the smallest numerator.  The first hit is always in lowest
    terms.  With ``closed_hi`` the upper end is included.
    """
    lo_f, hi_f = Fraction(lo), Fraction(hi)
    if not (0 < lo_f < hi_f <= Fraction(1, 2)):
        raise InvalidIntervalError(f"need 0 < lo < hi <= 1/2, got ({lo}, {hi})")
    q = 3
    while True:
        # smallest odd p with p/q > lo
        p = math.floor(lo_f * q) + 1
        if p % 2 == 0:
            p += 1
        cand = Fraction(p, q)
        if cand < hi_f or (closed_hi and cand == hi_f):
            return OddFraction((p - 1) // 2, (q - 1) // 2)
        q += 2


def near_extremal(theta: float, eps: float) -> ExtremalWitness:
    """An extremal sequence for some odd/odd theta' > theta with |S| > cot(pi*theta/2) - eps.

    The search interval (theta, hi) starts at hi = 1/2 and halves toward
    theta until the candidate clears the target.
    """
    theta = validate_theta(theta)
    if not (eps > 0 and math.isfinite(eps)):
        raise InvalidParameterError(f"epsilon must be positive, got {eps!r}")
    target = landau_bound(theta)
    if theta == 0.5:
        w = extremal_half()
        return ExtremalWitness(0.5, w.sequence, w.abs_sum, target, w.attained,
                               theta_prime=Fraction(1, 2), exact_theta=Fraction(1, 2))
    hi = 0.5
    while True:
        f = odd_fraction_in(theta, hi)
        if landau_bound(f.value) > target - eps:
            break
        hi = theta + (hi - theta) / 2.0
    w = extremal_sequence(f)
    require_admissible(w.sequence, theta)
    return ExtremalWitness(
        theta=theta,
        sequence=w.sequence,
        abs_sum=w.abs_sum,
        target=target,
        attained=abs(w.abs_sum - target) <= ATTAIN_TOL,
        theta_prime=f.fraction,
    )


def attainment_check(a: PhaseSequence, theta: float) -> bool:
    require_admissible(a, theta)
    return abs(exp_sum(a)) >= landau_bound(theta) - ATTAIN_TOL


# -- the bound 1/(pi*theta) + 1 ---------------------------------------------


def false_bound(theta: float) -> float:
    return 1.0 / (math.pi * theta) + 1.0


def false_bound_crossing() -> float:
    """The theta in (0, 1/2) where cot(pi*theta/2) = 1/(pi*theta) + 1.

    Below it the sharp bound exceeds the claimed one, so any bound-attaining
    sequence there is a counterexample.
    """
    return brentq(lambda t: landau_bound(t) - false_bound(t), 1e-6, 0.5, xtol=1e-15, rtol=1e-15)


def exact_odd_fraction(theta: float | Fraction, max_den: int = 10**6) -> Optional[Fraction]:
    """The odd/odd fraction (or 1/2) that ``theta`` denotes, if any.

    Floats are matched against the best rational approximation with
    denominator up to ``max_den``, and accepted only if they round-trip.
    """
    if isinstance(theta, Fraction):
        f = theta
    else:
        f = Fraction(theta).limit_denominator(max_den)
        if float(f) != theta:
            return None
    if f == Fraction(1, 2) or (f.numerator % 2 == 1 and f.denominator % 2 == 1):
        return f
    return None


@dataclass(frozen=True)
class Refutation:
    theta: float
    theta_prime: Fraction
    sequence: PhaseSequence
    abs_sum: float
    landau_bound: float
    false_bound: float
    margin: float
    crossing: float

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "theta_prime": float(self.theta_prime),
            "theta_prime_fraction": f"{self.theta_prime.numerator}/{self.theta_prime.denominator}",
            "phases": self.sequence.phases.tolist(),
            "abs_sum": self.abs_sum,
            "target": self.landau_bound,
            "bound_false": self.false_bound,
            "margin": self.margin,
            "crossing": self.crossing,
            "attained": abs(self.abs_sum - self.landau_bound) <= ATTAIN_TOL,
        }


def verify_refutation(r: Refutation) -> tuple[bool, float]:
    """Recompute from the raw phases; returns (still a counterexample, margin)."""
    theta_p = float(r.theta_prime)
    ok = check_admissible(r.sequence, theta_p).admissible
    margin = abs(exp_sum(r.sequence)) - false_bound(theta_p)
    return ok and margin > 0, margin


def refute_false_bound(theta: float | Fraction, search_below: bool = True) -> Refutation:
    """A sequence admissible at some theta' <= theta with |S| > 1/(pi*theta') + 1.

    If ``theta`` itself is odd/odd and below the crossing it is used directly;
    otherwise, with ``search_below``, the odd/odd fraction of smallest
    denominator in (u/2, u] is taken, where u = min(theta, crossing).
    """
    exact = exact_odd_fraction(theta)
    theta_f = validate_theta(float(theta))
    crossing = false_bound_crossing()
    diagnostics = {
        "theta": theta_f,
        "bound_landau": landau_bound(theta_f),
        "bound_false": false_bound(theta_f),
        "crossing": crossing,
    }
    if exact is not None and exact != Fraction(1, 2) and landau_bound(float(exact)) > false_bound(float(exact)):
        chosen = exact
    elif search_below:
        u = math.nextafter(crossing, 0.0) if crossing < theta_f else theta_f
        chosen = odd_fraction_in(u / 2.0, u, closed_hi=True).fraction
        if float(chosen) >= crossing:
            raise NoCounterexampleError("no odd/odd fraction found below the crossing", diagnostics)
    else:
        raise NoCounterexampleError(
            f"cot(pi*theta/2) does not exceed 1/(pi*theta) + 1 at theta={theta_f}"
            if exact is not None
            else f"theta={theta_f} is not an odd/odd fraction",
            diagnostics,
        )
    w = extremal_sequence(OddFraction.from_fraction(chosen))
    fb = false_bound(w.theta)
    return Refutation(
        theta=theta_f,
        theta_prime=chosen,
        sequence=w.sequence,
        abs_sum=w.abs_sum,
        landau_bound=w.target,
        false_bound=fb,
        margin=w.abs_sum - fb,
        crossing=crossing,
    )


@dataclass(frozen=True)
class BestConstantRow:
    j: int
    theta: float
    abs_sum: float
    scaled: float  # theta * |S|


def best_constant_scan(j_max: int) -> list[BestConstantRow]:
    """theta_j * |S| for the extremal witnesses at theta_j = 1/(2j+1)."""
    if j_max < 1:
        raise InvalidParameterError("j_max must be at least 1")
    rows = []
    for j in range(1, j_max + 1):
        w = extremal_sequence(OddFraction(0, j))
        rows.append(BestConstantRow(j, w.theta, w.abs_sum, w.theta * w.abs_sum))
    return rows
