"""Numerical laboratory for the spatially periodic field-road KPP system.

A fast-diffusing road exchanges population with a reaction-diffusion field on
a strip capped by a Dirichlet condition; this package assembles the discrete
twisted eigenvalue problem, computes principal eigenvalues and their
half-plane limit, minimizes -lambda(alpha)/alpha into spreading speeds, time
steps the nonlinear system with a monotone IMEX scheme, and measures front
positions, speeds, the spreading dichotomy and the pulsating-front relation.
"""

from .errors import (
    ConfigError,
    ConvergenceError,
    DiagnosticsError,
    DomainError,
    FieldRoadError,
    NumericalError,
    PropertyError,
)
from .model import (
    KppReport,
    ModelParams,
    PeriodicCoefficient,
    ReactionSpec,
    constant_coefficient,
    f_eval,
    fv0,
    homogeneous_logistic,
    kpp_check,
    logistic_reaction,
)
from .discrete import (
    DiscreteOperator,
    StripGrid,
    assemble_eigen_operator,
    assemble_evolution_operator,
    build_grid,
    build_window_grid,
    dump_operator,
)
from .simulate import (
    SimConfig,
    State,
    Stepper,
    Trajectory,
    bump_init,
    kpp_subsolution,
    simulate,
    step,
    subsolution_profile,
)
from .steady import PersistenceReport, SteadyState, compute_steady, persistence_check, tile_steady
from .spectral import (
    EigenPair,
    GridPolicy,
    HalfPlaneEigen,
    eigen_bounds,
    halfplane_eigen,
    principal_eigen,
    shift_bound,
    verify_eigen_properties,
)
from .speed import SpeedResult, sample_dispersion, speed_halfplane, speed_strip
from .diagnostics import (
    DichotomyReport,
    FrontTrace,
    PulsatingDeviation,
    SpeedFit,
    dichotomy_check,
    estimate_speed,
    pulsating_diagnostic,
    track_front,
)

__version__ = "0.1.0"
