"""Best approximation control for the infeasible double integrator.

Analytic bang-bang solutions, exact grid projections and the relaxed
Douglas-Rachford algorithm for ``x'' = u`` on [0, 1] with ``|u| <= a``.
"""
from .analytic import (
    Constant,
    GapLine,
    NewtonConfig,
    SolveTrace,
    TwoPiece,
    asymptotic_ts,
    best_approx,
    control_eval,
    newton_iterate,
    newton_solve,
    residual,
    residual_jacobian,
)
from .dr import DRConfig, DRReport, dr_solve, sweep
from .grid import (
    ControlGrid,
    extract_switch,
    fraction_within,
    integrate,
    integrate_weighted,
    simulate,
    sup_norm_diff,
)
from .portrait import PortraitGrid, PortraitSpec, portrait
from .problem import (
    CASE_STUDY,
    BoundaryData,
    CriticalResult,
    Feasibility,
    ProblemInstance,
    classify,
    critical_bound,
)
from .projections import project_A, project_B

__version__ = "0.1.0"
