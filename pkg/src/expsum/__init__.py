"""Executable Kuzmin-Landau lemma: exponential sums over admissible phases,
proof decompositions, extremal constructions and a sharpness search."""

from .core import (
    AdmissibilityReport,
    BoundLadder,
    BoundReport,
    GapProfile,
    PhaseSequence,
    bound_ladder,
    bound_report,
    check_admissible,
    exp_sum,
    gap_profile,
    landau_bound,
    phases_from_gaps,
    random_admissible,
)
from .errors import (
    DegenerateError,
    ExpsumError,
    InvalidFractionError,
    InvalidIntervalError,
    InvalidParameterError,
    InvalidSequenceError,
    NoCounterexampleError,
    NonMonotoneGapsError,
    NotAdmissibleError,
    TooShortError,
)
from .extremal import (
    ExtremalWitness,
    OddFraction,
    attainment_check,
    best_constant_scan,
    extremal_half,
    extremal_sequence,
    near_extremal,
    odd_fraction_in,
    refute_false_bound,
    verify_refutation,
)
from .kuzmin_geometry import (
    ChainGeometry,
    build_chain,
    kuzmin_bound_trace,
    verify_center_spacing,
    verify_radius_identity,
    verify_telescoping,
)
from .landau_identity import (
    LandauDecomposition,
    landau_decompose,
    refined_bound,
    verify_halfturn_identities,
    verify_shift_identity,
)
from .sharpness_search import (
    SearchConfig,
    SearchResult,
    maximize,
    objective_and_gradient,
    project_admissible,
)

__version__ = "0.1.0"
