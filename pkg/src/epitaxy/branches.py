"""Forcing-amplitude sweeps and location of the fold.

The two stationary branches exist for lambda below a critical
amplitude lambda_c at which they merge and disappear; above it the
slope scan finds no admissible shot.  The sweep records both branches
per amplitude; the fold locator bisects on the predicate "the scan
finds at least two roots".

Near the fold the two roots approach each other like
sqrt(lambda_c - lambda) and a fixed scan eventually cannot separate
them, which would make the predicate flip false early.  Whenever the
observed root separation drops below four scan cells the scan density
is doubled (and stays doubled), so the resolution keeps pace with the
shrinking gap all the way to the bracket tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .model import BoundaryKind, ProblemSpec
from .shoot import AmbiguousClassification, NoSolutions, solve_branches, find_roots

__all__ = [
    "BranchPoint",
    "BifurcationDiagram",
    "CriticalEstimate",
    "InvalidBracket",
    "sweep_lambda",
    "find_lambda_critical",
    "BRACKET_TOL",
]

#: default bisection bracket widths for the fold location, per edge kind
BRACKET_TOL = {BoundaryKind.DIRICHLET: 1e-2, BoundaryKind.NAVIER: 1e-3}

_MAX_BISECT = 200


class InvalidBracket(ValueError):
    """The two-root predicate does not differ between the endpoints."""


@dataclass(frozen=True)
class BranchPoint:
    """One sweep sample; fields are None where a branch is absent."""

    lam: float
    s_min: float | None
    s_mp: float | None
    energy_min: float | None
    energy_mp: float | None

    @property
    def solved(self) -> bool:
        return self.s_min is not None and self.s_mp is not None


@dataclass(frozen=True)
class CriticalEstimate:
    """Fold location as midpoint +/- uncertainty.

    The uncertainty is the final bisection half-width plus one
    scan-cell-equivalent in lambda (cell size in s divided by the
    observed slope of root separation versus lambda), covering both
    the bisection truncation and the scan's ability to resolve the
    closing gap.
    """

    value: float
    uncertainty: float


@dataclass(frozen=True)
class BifurcationDiagram:
    bc: BoundaryKind
    points: tuple[BranchPoint, ...]
    lambda_critical: CriticalEstimate | None = None

    def __post_init__(self):
        lams = [p.lam for p in self.points]
        if sorted(lams) != lams:
            raise ValueError("diagram points must be sorted by lam")


def _spec_at(bc: BoundaryKind, base_spec: ProblemSpec | None, lam: float) -> ProblemSpec:
    if base_spec is None:
        return ProblemSpec(bc=bc, lam=lam)
    return replace(base_spec, bc=bc, lam=lam)


def sweep_lambda(
    bc: BoundaryKind,
    lambdas,
    base_spec: ProblemSpec | None = None,
) -> BifurcationDiagram:
    """Solve both branches at each amplitude and collect the diagram.

    Per-amplitude failures (no roots, or a pair too degenerate to
    classify) are recorded as absent branches, never raised; the sweep
    always completes.
    """
    lams = [float(x) for x in lambdas]
    if any(x < 0.0 for x in lams):
        raise ValueError("forcing amplitudes must be nonnegative")
    if sorted(lams) != lams:
        raise ValueError("forcing amplitudes must be ascending")
    points = []
    for lam in lams:
        spec = _spec_at(bc, base_spec, lam)
        try:
            out = solve_branches(spec)
        except AmbiguousClassification:
            points.append(BranchPoint(lam, None, None, None, None))
            continue
        if isinstance(out, NoSolutions):
            points.append(BranchPoint(lam, None, None, None, None))
        else:
            points.append(BranchPoint(
                lam,
                out.minimum.s,
                out.mountain_pass.s,
                out.energy_min.total,
                out.energy_mp.total,
            ))
    return BifurcationDiagram(bc=bc, points=tuple(points))


def find_lambda_critical(
    bc: BoundaryKind,
    base_spec: ProblemSpec | None = None,
    bracket: tuple[float, float] = (0.0, 0.0),
    tol: float | None = None,
) -> CriticalEstimate:
    """Bisect for the amplitude where the two branches merge.

    The predicate is "find_roots returns at least two slopes"; it must
    hold at bracket[0] and fail at bracket[1], otherwise InvalidBracket
    is raised.  Bisection stops once the bracket width drops below tol
    (1e-2 clamped, 1e-3 hinged by default).
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (0.0 <= lo < hi):
        raise InvalidBracket("need 0 <= lo < hi, got (%g, %g)" % (lo, hi))
    if tol is None:
        tol = BRACKET_TOL[bc]

    base_points = _spec_at(bc, base_spec, lo).scan_points
    state = {"factor": 1, "gaps": []}  # gaps: (lam, separation) at true evals

    def predicate(lam: float) -> bool:
        spec = _spec_at(bc, base_spec, lam)
        if state["factor"] > 1:
            spec = replace(spec, scan_points=base_points * state["factor"])
        roots = find_roots(spec)
        if len(roots) < 2:
            return False
        gap = roots[-1] - roots[0]
        state["gaps"].append((lam, gap))
        cell = 2.0 * spec.scan_range / (spec.scan_points - 1)
        if gap < 4.0 * cell:
            state["factor"] *= 2
        return True

    if not predicate(lo):
        raise InvalidBracket("fewer than two roots at the lower endpoint %g" % lo)
    if predicate(hi):
        raise InvalidBracket("still two roots at the upper endpoint %g" % hi)

    for _ in range(_MAX_BISECT):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            lo = mid
        else:
            hi = mid

    value = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    uncertainty = half
    gaps = state["gaps"]
    if len(gaps) >= 2 and gaps[-1][0] != gaps[-2][0]:
        slope = abs((gaps[-1][1] - gaps[-2][1]) / (gaps[-1][0] - gaps[-2][0]))
        if slope > 0.0:
            spec = _spec_at(bc, base_spec, value)
            cell = 2.0 * spec.scan_range / (base_points * state["factor"] - 1)
            uncertainty = half + cell / slope
    return CriticalEstimate(value=value, uncertainty=uncertainty)
