"""Point spectra of tridiagonal bosonic Hamiltonians from monotone flows of
orthogonal-polynomial zeros, with the continued-fraction baseline, discrete
orthogonality measures, growth-class membership tests, and an
exact-solvability lattice classifier."""

__version__ = "0.1.0"

from .classifier import ClassReport, characteristic_roots, classify
from .errors import (
    DegenerateFit,
    Divergent,
    KappaZero,
    MissingRoots,
    NonlinearCoefficient,
    NonMonotoneFlow,
    NonPositiveLambda,
    NotMinimal,
    ParseError,
    PoleHit,
    TooFewLevels,
    ZeroCoagulation,
    ZeroflowError,
)
from .flows import (
    GrowthSchedule,
    LevelResult,
    SpectrumResult,
    ZeroFlow,
    ZeroTableau,
    flow_trace,
    run_flows,
    zeros_of,
)
from .lattice import (
    FAMILIES,
    LatticeFit,
    best_lattice_fit,
    fit_lattice,
    solvability_distance,
)
from .measure import (
    DiscreteMeasure,
    EigenvectorResult,
    SpectralMass,
    eval_E,
    eval_F,
    partial_fractions,
    reconstruct_eigenvector,
    spectral_mass,
)
from .models import (
    RabiParams,
    TabulatedModel,
    displaced_oscillator_spectrum,
    displaced_recurrence,
    load_tabulated,
    rabi_raw_recurrence,
    rabi_recurrence,
    tabulated_recurrence,
)
from .recurrence import (
    MonicRecurrence,
    RawRecurrence,
    RecurrenceAsymptotics,
    count_zeros_below,
    eval_sequence,
    to_monic,
)
from .scaled import ScaledReal

__all__ = [
    "ClassReport",
    "DegenerateFit",
    "DiscreteMeasure",
    "Divergent",
    "EigenvectorResult",
    "FAMILIES",
    "GrowthSchedule",
    "KappaZero",
    "LatticeFit",
    "LevelResult",
    "MissingRoots",
    "MonicRecurrence",
    "NonMonotoneFlow",
    "NonPositiveLambda",
    "NonlinearCoefficient",
    "NotMinimal",
    "ParseError",
    "PoleHit",
    "RabiParams",
    "RawRecurrence",
    "RecurrenceAsymptotics",
    "ScaledReal",
    "SpectralMass",
    "SpectrumResult",
    "TabulatedModel",
    "TooFewLevels",
    "ZeroCoagulation",
    "ZeroFlow",
    "ZeroTableau",
    "ZeroflowError",
    "best_lattice_fit",
    "characteristic_roots",
    "classify",
    "count_zeros_below",
    "displaced_oscillator_spectrum",
    "displaced_recurrence",
    "eval_E",
    "eval_F",
    "eval_sequence",
    "fit_lattice",
    "flow_trace",
    "load_tabulated",
    "partial_fractions",
    "rabi_raw_recurrence",
    "rabi_recurrence",
    "reconstruct_eigenvector",
    "run_flows",
    "solvability_distance",
    "spectral_mass",
    "tabulated_recurrence",
    "to_monic",
    "zeros_of",
]
