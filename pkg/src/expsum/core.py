"""Phase sequences, gap admissibility, exponential sums and the bound ladder.

Phases are measured in cycles: the term attached to a phase ``a`` is
``exp(2*pi*i*a)``.  Phases are never reduced modulo one when gaps are
formed; reduction only happens inside :func:`unit_terms`, where it is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InvalidParameterError, InvalidSequenceError, NotAdmissibleError

FLAG_TOL = 1e-9


def validate_theta(theta: float) -> float:
    theta = float(theta)
    if not math.isfinite(theta) or not (0.0 < theta <= 0.5):
        raise InvalidParameterError(f"theta must lie in (0, 1/2], got {theta!r}")
    return theta


def cot(x):
    """Cotangent as cos/sin, so the sign stays transparent near pi/2."""
    return np.cos(x) / np.sin(x)


def unit_terms(phases) -> tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of exp(2*pi*i*a) for each phase.

    The integer part is removed first.  ``a - round(a)`` is exact in binary64,
    so large phases lose no accuracy before the multiplication by 2*pi.
    """
    a = np.asarray(phases, dtype=float)
    r = a - np.rint(a)
    angle = 2.0 * np.pi * r
    return np.cos(angle), np.sin(angle)


@dataclass(frozen=True, eq=False)
class PhaseSequence:
    """Strictly increasing, finite real phases a_1 < ... < a_n (in cycles)."""

    phases: np.ndarray

    def __post_init__(self):
        arr = np.array(self.phases, dtype=float).ravel()
        if arr.size < 1:
            raise InvalidSequenceError("a phase sequence needs at least one phase")
        if not np.all(np.isfinite(arr)):
            raise InvalidSequenceError("phases must be finite")
        if arr.size > 1 and not np.all(arr[1:] > arr[:-1]):
            k = int(np.argmax(~(arr[1:] > arr[:-1])))
            raise InvalidSequenceError(
                f"phases must be strictly increasing (a_{k + 1} >= a_{k + 2})"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "phases", arr)

    @property
    def n(self) -> int:
        return int(self.phases.size)

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return iter(self.phases.tolist())

    def __eq__(self, other):
        if not isinstance(other, PhaseSequence):
            return NotImplemented
        return np.array_equal(self.phases, other.phases)

    def __hash__(self):
        return hash(self.phases.tobytes())

    def __repr__(self):
        return f"PhaseSequence({self.phases.tolist()!r})"

    def shifted(self, c: float) -> "PhaseSequence":
        return PhaseSequence(self.phases + c)


@dataclass(frozen=True)
class GapProfile:
    gaps: tuple[float, ...]

    def __len__(self):
        return len(self.gaps)


def gap_profile(a: PhaseSequence) -> GapProfile:
    return GapProfile(tuple(np.diff(a.phases).tolist()))


@dataclass(frozen=True)
class AdmissibilityReport:
    theta: float
    gaps: tuple[float, ...]
    monotone: bool
    theta_star: float
    first_violation: Optional[int]
    admissible: bool

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "n": len(self.gaps) + 1,
            "gaps": list(self.gaps),
            "monotone": self.monotone,
            "theta_star": self.theta_star,
            "first_violation": self.first_violation,
            "admissible": self.admissible,
        }


def check_admissible(a: PhaseSequence, theta: float) -> AdmissibilityReport:
    """Check theta <= d_1 <= ... <= d_{n-1} <= 1 - theta with zero slack.

    ``first_violation`` is the 1-based index k of the first gap with
    d_k > d_{k+1}.  A single phase is admissible for every valid theta.
    """
    theta = validate_theta(theta)
    gaps = np.diff(a.phases)
    if gaps.size == 0:
        return AdmissibilityReport(theta, (), True, 0.5, None, True)

    drops = np.nonzero(gaps[1:] < gaps[:-1])[0]
    monotone = drops.size == 0
    first_violation = None if monotone else int(drops[0]) + 1
    if monotone:
        theta_star = min(max(min(float(gaps[0]), 1.0 - float(gaps[-1])), 0.0), 0.5)
    else:
        theta_star = 0.0
    admissible = bool(monotone and theta <= gaps[0] and gaps[-1] <= 1.0 - theta)
    return AdmissibilityReport(
        theta, tuple(gaps.tolist()), bool(monotone), theta_star, first_violation, admissible
    )


def require_admissible(a: PhaseSequence, theta: float) -> AdmissibilityReport:
    report = check_admissible(a, theta)
    if not report.admissible:
        if not report.monotone:
            why = f"gaps decrease at k={report.first_violation}"
        else:
            why = f"gaps leave [{report.theta}, {1.0 - report.theta}]"
        raise NotAdmissibleError(f"sequence is not admissible for theta={theta}: {why}", report)
    return report


def exp_sum(a: PhaseSequence) -> complex:
    """Sum of exp(2*pi*i*a_k), real and imaginary parts summed with math.fsum."""
    re, im = unit_terms(a.phases)
    return complex(math.fsum(re), math.fsum(im))


@dataclass(frozen=True)
class BoundLadder:
    theta: float
    landau: float
    kuzmin: float
    simple: float
    two_over_pi_theta: float
    false: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.landau, self.kuzmin, self.simple, self.two_over_pi_theta, self.false)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "bound_landau": self.landau,
            "bound_kuzmin": self.kuzmin,
            "bound_simple": self.simple,
            "bound_2_over_pi_theta": self.two_over_pi_theta,
            "bound_false": self.false,
        }


def landau_bound(theta: float) -> float:
    """The sharp bound cot(pi*theta/2)."""
    x = math.pi * theta / 2.0
    return math.cos(x) / math.sin(x)


def bound_ladder(theta: float) -> BoundLadder:
    theta = validate_theta(theta)
    return BoundLadder(
        theta=theta,
        landau=landau_bound(theta),
        kuzmin=2.0 / math.sin(math.pi * theta),
        simple=1.0 / theta,
        two_over_pi_theta=2.0 / (math.pi * theta),
        false=1.0 / (math.pi * theta) + 1.0,
    )


@dataclass(frozen=True)
class BoundReport:
    n: int
    theta: float
    sum: complex
    abs_sum: float
    ladder: BoundLadder
    bound_refined: Optional[float]
    flags: dict = field(default_factory=dict)

    @property
    def bound_landau(self):
        return self.ladder.landau

    @property
    def bound_kuzmin(self):
        return self.ladder.kuzmin

    @property
    def bound_simple(self):
        return self.ladder.simple

    @property
    def bound_two_over_pi_theta(self):
        return self.ladder.two_over_pi_theta

    @property
    def bound_false(self):
        return self.ladder.false

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "theta": self.theta,
            "sum_re": self.sum.real,
            "sum_im": self.sum.imag,
            "abs_sum": self.abs_sum,
        }
        ladder = self.ladder.to_dict()
        del ladder["theta"]
        d.update(ladder)
        d["bound_refined"] = self.bound_refined
        d["flags"] = dict(self.flags)
        return d


def bound_report(a: PhaseSequence, theta: float) -> BoundReport:
    from .landau_identity import refined_bound

    require_admissible(a, theta)
    s = exp_sum(a)
    abs_s = abs(s)
    ladder = bound_ladder(theta)
    refined = refined_bound(a) if a.n >= 2 else None
    flags = {
        "landau": abs_s <= ladder.landau + FLAG_TOL,
        "kuzmin": abs_s <= ladder.kuzmin + FLAG_TOL,
        "simple": abs_s <= ladder.simple + FLAG_TOL,
        "two_over_pi_theta": abs_s <= ladder.two_over_pi_theta + FLAG_TOL,
        "false": abs_s <= ladder.false + FLAG_TOL,
        "refined": None if refined is None else abs_s <= refined + FLAG_TOL,
    }
    return BoundReport(a.n, ladder.theta, s, abs_s, ladder, refined, flags)


# -- exact realization of gap vectors --------------------------------------


def _grid_exponent(n: int) -> int:
    # n - 1 gaps below one keep every phase under n; multiples of 2**-k below
    # 2**(53 - k) are exact in binary64
    return 53 - max(1, math.ceil(math.log2(n)))


def dyadic_gap_bounds(theta: float, n: int) -> tuple[float, float]:
    """Grid-aligned gap bounds lo, hi with theta <= lo and hi <= 1 - theta."""
    scale = 2.0 ** _grid_exponent(n)
    lo = math.ceil(theta * scale) / scale
    hi = math.floor((1.0 - theta) * scale) / scale
    return lo, hi


def phases_from_gaps(gaps: Sequence[float], theta: Optional[float] = None,
                     start: float = 0.0) -> PhaseSequence:
    """Build phases whose floating differences reproduce the gaps exactly.

    Gaps are rounded to a dyadic grid fine enough that every partial sum is
    representable, so ``np.diff`` of the result returns the rounded gaps
    bit for bit.  With ``theta`` given, rounded gaps are also clipped to the
    grid-aligned admissible box; a non-decreasing input then yields a
    sequence that passes :func:`check_admissible` exactly.
    """
    g = np.asarray(gaps, dtype=float).ravel()
    n = g.size + 1
    scale = 2.0 ** _grid_exponent(n)
    q = np.rint(g * scale) / scale
    if theta is not None:
        lo, hi = dyadic_gap_bounds(validate_theta(theta), n)
        q = np.clip(q, lo, hi)
    start = math.floor(start * scale) / scale
    phases = np.empty(n)
    phases[0] = start
    np.cumsum(q, out=phases[1:])
    phases[1:] += start
    return PhaseSequence(phases)


def random_admissible(rng: np.random.Generator, n: int, theta: float) -> PhaseSequence:
    """Random sequence with sorted uniform gaps in [theta, 1 - theta]."""
    theta = validate_theta(theta)
    gaps = np.sort(rng.uniform(theta, 1.0 - theta, size=max(n - 1, 0)))
    return phases_from_gaps(gaps, theta)


def parse_phases(values: Iterable[float]) -> PhaseSequence:
    return PhaseSequence(np.fromiter((float(v) for v in values), dtype=float))
