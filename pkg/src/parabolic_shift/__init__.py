"""Parabolic self-maps of the upper half-plane given by Herglotz data (beta, mu):
evaluation, iteration, finite-shift classification and rate-of-convergence checks."""

from ._backend import BACKEND
from .classifier import (
    Agreement,
    MomentReport,
    ShiftKind,
    ShiftVerdict,
    agreement_suite,
    classify_shift,
    cross_validate,
    random_atomic_map,
)
from .disk import (
    DiskSetting,
    cayley,
    cayley_inv,
    disk_map,
    disk_orbit_gap,
    rate_constant,
    verify_rate,
)
from .errors import (
    DomainError,
    InsufficientOrbit,
    NotFiniteShift,
    NumericalBreakdown,
    Overflow,
    ParabolicShiftError,
    ParseError,
    QuadratureFailure,
    UndefinedMoment,
    ValidationError,
)
from .halfplane import ParabolicMap, QuadratureSettings, drift, evaluate, imaginary_gain
from .measure import Atom, HistogramPiece, PowerTail, RealMeasure, integrate_kernel, moment, total_mass
from .orbit import (
    LimitEstimate,
    Orbit,
    OracleVerdict,
    OrbitDiagnostics,
    aitken_limit,
    drift_limit,
    iterate,
    pommerenke_quantities,
    pseudo_hyperbolic_distance,
    shift_oracle,
)

__version__ = "0.1.0"
