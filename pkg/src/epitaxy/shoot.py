"""Shooting on the edge slope and two-branch classification.

A stationary radial profile is admissible iff w = r u' vanishes at the
origin.  We integrate backward from r = 1 with the edge data of the
requested kind parameterized by a single slope s, and score each shot
by the scaled terminal value

    residual(s) = w(eps) / eps,

which converges to w'(0) = u'(0) for genuine solutions and stays O(1/eps)
otherwise, so roots of the residual in s are exactly the admissible
slopes.  A uniform scan over [-S, S] brackets sign changes; bisection
refines each bracket until the slope is pinned to a relative width of
1e-10 *and* the residual magnitude drops below 1e-6.

For forcing amplitudes below the fold the scan yields two slopes.  The
one whose reconstructed height has the lower energy is the minimum
branch; the other is the mountain pass.  At lambda = 0 the trivial
profile u = 0 joins the game: the scan cannot bracket it (the residual
is flat zero on one side), so s = 0 is injected as a known root.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import energy as _energy
from .integrate import Blowup, WProfile, integrate_backward, terminal_w
from .model import BoundaryKind, ProblemSpec

__all__ = [
    "ShotResult",
    "BranchPair",
    "NoSolutions",
    "AmbiguousClassification",
    "ScanTooCoarse",
    "residual",
    "scan_residuals",
    "find_roots",
    "solve_branches",
]

#: accept a root only once the bracket has shrunk this far (relative)
SLOPE_TOL = 1e-10
#: ... and the scaled terminal value is this small
RESIDUAL_TOL = 1e-6
#: slopes closer than this (relative) collapse into one root
DEDUPE_TOL = 1e-8

_MAX_BISECT = 200


class ScanTooCoarse(UserWarning):
    """The slope scan may be missing or merging sign changes."""


class AmbiguousClassification(RuntimeError):
    """Two candidate branches with energies too close to order reliably."""


@dataclass(frozen=True)
class ShotResult:
    """One admissible slope with its trajectory and terminal residual."""

    s: float
    residual: float
    profile: WProfile


@dataclass(frozen=True)
class NoSolutions:
    """Outcome value for forcing amplitudes past the fold."""

    bc: BoundaryKind
    lam: float


@dataclass(frozen=True)
class BranchPair:
    """The two stationary branches at one forcing amplitude.

    fold_coincident marks the degenerate case where the scan resolves
    only a single slope at (numerically) the fold itself; the two
    members then alias the same shot.
    """

    lam: float
    minimum: ShotResult
    mountain_pass: ShotResult
    energy_min: _energy.EnergyReport
    energy_mp: _energy.EnergyReport
    fold_coincident: bool = False


def residual(spec: ProblemSpec, s: float) -> float | Blowup:
    """Scaled terminal value w(eps)/eps of one backward shot."""
    w_eps, ok, stopped = terminal_w(spec, np.array([float(s)]))
    if not ok[0]:
        return Blowup(s=float(s), radius_reached=float(stopped[0]))
    return float(w_eps[0]) / spec.epsilon


def scan_residuals(spec: ProblemSpec):
    """Residuals on the uniform slope grid [-S, S].

    Returns (slopes, residuals, finite) where residuals is NaN at
    blown-up shots and finite flags the usable entries.
    """
    slopes = np.linspace(-spec.scan_range, spec.scan_range, spec.scan_points)
    w_eps, ok, _ = terminal_w(spec, slopes)
    res = np.where(ok, w_eps / spec.epsilon, np.nan)
    return slopes, res, ok


def _bisect(spec: ProblemSpec, a: float, fa: float, b: float, fb: float):
    """Refine one sign-change bracket.  Returns (root, residual) or None.

    Emits ScanTooCoarse when the residual is non-monotone inside the
    bracket (midpoint magnitude above both endpoints), the footprint of
    two roots sharing a scan cell.
    """
    warned = False
    best_s, best_f = (a, fa) if abs(fa) <= abs(fb) else (b, fb)
    for _ in range(_MAX_BISECT):
        m = 0.5 * (a + b)
        fm = residual(spec, m)
        if isinstance(fm, Blowup):
            warnings.warn(
                "bracket [%g, %g] collapsed onto a blow-up shot" % (a, b),
                ScanTooCoarse,
            )
            return None
        if abs(fm) < abs(best_f):
            best_s, best_f = m, fm
        if not warned and abs(fm) > max(abs(fa), abs(fb)):
            warnings.warn(
                "residual non-monotone inside bracket [%g, %g]; "
                "scan_points is likely too small for this forcing amplitude"
                % (a, b),
                ScanTooCoarse,
            )
            warned = True
        if fm == 0.0:
            return m, fm
        if (fm > 0.0) == (fa > 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
        width = b - a
        scale = max(1.0, abs(m))
        if width <= SLOPE_TOL * scale and abs(best_f) <= RESIDUAL_TOL:
            return best_s, best_f
        if width <= 4.0 * np.finfo(float).eps * scale:
            break
    if abs(best_f) <= RESIDUAL_TOL:
        return best_s, best_f
    warnings.warn(
        "bracket [%g, %g] hit the slope resolution floor with residual %g"
        % (a, b, best_f),
        ScanTooCoarse,
    )
    return None


def find_roots(spec: ProblemSpec) -> list[float]:
    """All admissible slopes in [-S, S], ascending.

    Brackets adjacent to blown-up shots are discarded: the residual is
    not known to cross zero there.  At lambda = 0 the trivial slope 0
    is injected directly (exact root, never bracketable).
    """
    slopes, res, ok = scan_residuals(spec)
    found: list[tuple[float, float]] = []
    if spec.lam == 0.0:
        found.append((0.0, 0.0))
    for i in range(len(slopes) - 1):
        if not (ok[i] and ok[i + 1]):
            continue
        fa, fb = float(res[i]), float(res[i + 1])
        if fa == 0.0:
            found.append((float(slopes[i]), 0.0))
            continue
        if fb == 0.0:
            continue  # picked up as the left endpoint of the next cell
        if (fa > 0.0) == (fb > 0.0):
            continue
        hit = _bisect(spec, float(slopes[i]), fa, float(slopes[i + 1]), fb)
        if hit is not None:
            found.append(hit)
    if res[-1] == 0.0 and ok[-1]:
        found.append((float(slopes[-1]), 0.0))
    found.sort(key=lambda t: t[0])
    kept: list[tuple[float, float]] = []
    for s, f in found:
        if kept and abs(s - kept[-1][0]) <= DEDUPE_TOL * max(1.0, abs(s)):
            if abs(f) < abs(kept[-1][1]):  # keep the sharper twin
                kept[-1] = (s, f)
            continue
        kept.append((s, f))
    return [s for s, _ in kept]


def _shot(spec: ProblemSpec, s: float) -> ShotResult:
    profile = integrate_backward(spec, s)
    if isinstance(profile, Blowup):  # pragma: no cover - roots never blow up
        raise RuntimeError("accepted slope %g blew up on re-integration" % s)
    return ShotResult(s=s, residual=float(profile.w[0]) / spec.epsilon,
                      profile=profile)


def solve_branches(spec: ProblemSpec) -> BranchPair | NoSolutions:
    """Locate and classify both stationary branches at spec.lam.

    Returns NoSolutions (as a value, not an exception) when the scan
    finds no admissible slope.  A single slope at lam > 0 is treated as
    the fold point and paired with itself.  With two or more slopes the
    pair of lowest energies is kept and ordered by energy; a gap below
    1e-8 raises AmbiguousClassification.
    """
    roots = find_roots(spec)
    if not roots:
        return NoSolutions(bc=spec.bc, lam=spec.lam)
    shots = [_shot(spec, s) for s in roots]
    reports = [
        _energy.evaluate_functional(
            spec.bc, _energy.reconstruct_height(sh.profile), spec.lam,
            spec.forcing,
        )
        for sh in shots
    ]
    if len(shots) == 1:
        return BranchPair(
            lam=spec.lam,
            minimum=shots[0],
            mountain_pass=shots[0],
            energy_min=reports[0],
            energy_mp=reports[0],
            fold_coincident=True,
        )
    if len(shots) > 2:
        order = np.argsort([rep.total for rep in reports])[:2]
        shots = [shots[k] for k in order]
        reports = [reports[k] for k in order]
    (sh_a, sh_b), (rep_a, rep_b) = shots[:2], reports[:2]
    gap = rep_b.total - rep_a.total
    if abs(gap) < 1e-8:
        raise AmbiguousClassification(
            "energies %.12g and %.12g are too close to order branches"
            % (rep_a.total, rep_b.total)
        )
    if gap < 0.0:
        sh_a, sh_b = sh_b, sh_a
        rep_a, rep_b = rep_b, rep_a
    return BranchPair(
        lam=spec.lam,
        minimum=sh_a,
        mountain_pass=sh_b,
        energy_min=rep_a,
        energy_mp=rep_b,
    )
