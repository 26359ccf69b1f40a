"""Explicit monotone couplings whose discounted solutions refuse to converge.

The package constructs piecewise-linear (and sin-log) coupling triples
(f, g, h), solves the discounted two-equation system for any positive
discount factor, and demonstrates that the solution family approaches two
distinct cluster values along explicit discount sequences, so the full
family has no limit as the discount vanishes.  A torus-grid module verifies
the same behavior for the corresponding Hamilton-Jacobi system with
H(p) = p^2, whose solutions are the same constants.
"""

from .coupling import (
    DEFAULT_PARAMS,
    DEFAULT_SINLOG_PARAMS,
    SINLOG_SLOPE_MAX,
    SINLOG_SLOPE_MIN,
    CouplingParams,
    CouplingTriple,
    DerivedGeometry,
    RawCoupling,
    Variant,
    derive_geometry,
    eta_eval,
    f_eval,
    g_eval,
    h_eval,
    make_triple,
    psi_eval,
    sinlog_envelope,
)
from .errors import (
    BracketError,
    ConfigError,
    DiscountGapError,
    ParamDomainError,
    PartialReportError,
    PreconditionError,
    ScheduleDomainError,
    SolverError,
    ToleranceError,
)
from .experiment import (
    DiscountSchedule,
    NonconvergenceResult,
    ScheduleTag,
    SweepReport,
    SweepRow,
    make_schedule,
    run_sweep,
    sweep_summary,
    verify_nonconvergence,
    write_sweep_csv,
)
from .pde import GridSolution, TorusGrid, grid_residuals, lax_friedrichs_step, pde_sweep, solve_pde
from .solver import (
    DEFAULT_CONFIG,
    DiscountedSolution,
    SolverConfig,
    check_comparison,
    solve_reduced,
    solve_scalar,
    solve_system_iterative,
)

__version__ = "0.1.0"
