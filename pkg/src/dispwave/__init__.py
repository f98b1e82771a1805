"""Traveling waves of nonlocal dispersive equations.

Cosine collocation on a half period for the steady profiles, secant
continuation with orthogonal correction for the solution branches, and
an integrating-factor RK4 pseudospectral scheme for time evolution.
"""
from .config import ConfigError, EvolutionConfig, RunConfig, load_config, parse_config
from .continuation import (
    Branch,
    BranchTerminated,
    NavigationOptions,
    bootstrap,
    extend,
    refine_branch,
    solve_at_waveheight,
    step,
)
from .diagnostics import (
    BranchReport,
    FitReport,
    Functionals,
    InsufficientData,
    StabilityReport,
    branch_report,
    classify_stability,
    crest_count,
    cusp_ratio,
    cyclic_crest_count,
    dprime_check,
    dprime_mismatch,
    fit_decay,
    functionals,
)
from .equations import (
    Equation,
    NoExactSolution,
    catalog_names,
    eval_symbol,
    exact_solution,
    exact_waveheight_for_speed,
    make_equation,
)
from .evolution import (
    BlowUp,
    EvolutionOptions,
    PeriodicField,
    circular_shift,
    conserved,
    default_timestep,
    evolve,
    mirror_to_full,
    shift_compensated_deviation,
    superpose,
)
from .solver import (
    BoundaryCondition,
    ConstLevel,
    ContinuationFrame,
    HomogeneousB,
    MeanZero,
    NewtonOptions,
    NoConvergence,
    SingularJacobian,
    Solitary,
    SolutionPoint,
    SolverError,
    newton_solve,
)
from .spectral import (
    Grid,
    Wave,
    apply_operator,
    forward,
    inverse,
    make_grid,
    operator_matrix,
    refine,
    series_eval,
    steady_residual,
)
from .stokes import ResonantMode, StokesExpansion, initial_guess

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ConfigError",
    "EvolutionConfig",
    "RunConfig",
    "load_config",
    "parse_config",
    "Branch",
    "BranchTerminated",
    "NavigationOptions",
    "bootstrap",
    "extend",
    "refine_branch",
    "solve_at_waveheight",
    "step",
    "BranchReport",
    "FitReport",
    "Functionals",
    "InsufficientData",
    "StabilityReport",
    "branch_report",
    "classify_stability",
    "crest_count",
    "cyclic_crest_count",
    "cusp_ratio",
    "dprime_check",
    "dprime_mismatch",
    "fit_decay",
    "functionals",
    "Equation",
    "NoExactSolution",
    "catalog_names",
    "eval_symbol",
    "exact_solution",
    "exact_waveheight_for_speed",
    "make_equation",
    "BlowUp",
    "EvolutionOptions",
    "PeriodicField",
    "circular_shift",
    "conserved",
    "default_timestep",
    "evolve",
    "mirror_to_full",
    "shift_compensated_deviation",
    "superpose",
    "BoundaryCondition",
    "ConstLevel",
    "ContinuationFrame",
    "HomogeneousB",
    "MeanZero",
    "NewtonOptions",
    "NoConvergence",
    "SingularJacobian",
    "Solitary",
    "SolutionPoint",
    "SolverError",
    "newton_solve",
    "Grid",
    "Wave",
    "apply_operator",
    "forward",
    "inverse",
    "make_grid",
    "operator_matrix",
    "refine",
    "series_eval",
    "steady_residual",
    "ResonantMode",
    "StokesExpansion",
    "initial_guess",
]
