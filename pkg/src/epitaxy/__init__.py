"""Radial stationary states of a fourth-order epitaxial growth model.

The growth equation on the unit disk balances bending against the
determinant of the Hessian under a forcing of amplitude lambda.  For
radial profiles it reduces to a second-order final value problem in
w = r u', integrated backward from the rim; admissible slopes are the
roots of the scaled terminal residual w(eps)/eps.  Below a critical
amplitude the residual has two roots — an energy-minimizing branch and
a mountain-pass branch — which merge at a fold and disappear.

Layout: ``model`` (problem data), ``integrate`` (fixed-step RK4 core),
``shoot`` (root scan + bisection, branch classification), ``energy``
(height reconstruction, clamped/hinged functionals), ``branches``
(lambda sweeps and fold location), ``oracle`` (independent variational
minimizer on a fixed grid), ``export``/``cli`` (CSV/SVG/JSON artifacts
and the command-line front end).
"""

from .branches import (
    BifurcationDiagram,
    BranchPoint,
    CriticalEstimate,
    InvalidBracket,
    find_lambda_critical,
    sweep_lambda,
)
from .energy import (
    EnergyReport,
    GridTooCoarse,
    HeightProfile,
    evaluate_functional,
    reconstruct_height,
)
from .integrate import Blowup, WProfile, integrate_backward, terminal_w
from .model import BoundaryKind, Forcing, ProblemSpec, final_conditions, rhs_w
from .oracle import (
    DiscreteFunctional,
    MinimizeResult,
    NotConverged,
    discrete_gradient,
    el_residual,
    evaluate_discrete,
    minimize,
)
from .shoot import (
    AmbiguousClassification,
    BranchPair,
    NoSolutions,
    ScanTooCoarse,
    ShotResult,
    find_roots,
    solve_branches,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousClassification",
    "BifurcationDiagram",
    "Blowup",
    "BoundaryKind",
    "BranchPair",
    "BranchPoint",
    "CriticalEstimate",
    "DiscreteFunctional",
    "EnergyReport",
    "Forcing",
    "GridTooCoarse",
    "HeightProfile",
    "InvalidBracket",
    "MinimizeResult",
    "NoSolutions",
    "NotConverged",
    "ProblemSpec",
    "ScanTooCoarse",
    "ShotResult",
    "WProfile",
    "discrete_gradient",
    "el_residual",
    "evaluate_discrete",
    "evaluate_functional",
    "final_conditions",
    "find_lambda_critical",
    "find_roots",
    "integrate_backward",
    "minimize",
    "reconstruct_height",
    "rhs_w",
    "solve_branches",
    "sweep_lambda",
    "terminal_w",
    "__version__",
]
