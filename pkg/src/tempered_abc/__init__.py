"""Tempered fractional subdiffusion on unbounded domains with exact absorbing boundaries."""

from .calculus import (
    SampledFunction,
    TimeGrid,
    gl_weights,
    l1_weights,
    tempered_caputo,
    tempered_integral,
    tempered_rl,
)
from .config import ExperimentConfig
from .errors import (
    BranchError,
    ConfigError,
    DivergenceError,
    InvalidInputError,
    OracleInvalidError,
    SolverFailure,
    StabilityViolation,
    TemperedABCError,
    UnsupportedRangeError,
    WindowError,
)
from .experiments import RunReport, run
from .identities import parseval_spotcheck
from .laplace import laplace_forward, talbot_inverse
from .mittag_leffler import mittag_leffler
from .oracle import PaddedGrid, exact_mode, halfline_ode_check, solve_truncated
from .solver import (
    GridSpec,
    InitialCondition,
    ModelParams,
    SolutionHistory,
    boundary_flux_residual,
    solve_caputo_form,
    solve_rl_form,
)
from .stability import energy_report, weighted_norm_report

__version__ = "0.1.0"
