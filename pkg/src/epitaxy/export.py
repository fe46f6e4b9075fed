"""CSV / SVG / JSON writers for solved branches and sweep diagrams.

Formats are deliberately plain: CSV columns in a fixed order with full
double precision (so a re-import reproduces every derived quantity
bit-for-bit), a JSON run summary next to every artifact, and a single
SVG per figure.  The same profile layout ``r,w,u,up,upp`` serves both
the shooting trajectories and the discrete minimizer, which keeps the
``energy`` subcommand agnostic about where a file came from.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .branches import BifurcationDiagram
from .energy import HeightProfile, reconstruct_height
from .integrate import WProfile
from .model import ProblemSpec
from .shoot import BranchPair, NoSolutions

__all__ = [
    "PROFILE_HEADER",
    "DIAGRAM_HEADER",
    "export_csv",
    "export_svg",
    "write_summary",
    "read_profile_csv",
    "spec_echo",
]

PROFILE_HEADER = "r,w,u,up,upp"
DIAGRAM_HEADER = "lambda,s_min,s_mp,J_min,J_mp"

# 17 significant digits round-trip any float64 exactly
_FMT = "%.17g"


def _cell(x) -> str:
    return "" if x is None else _FMT % x


def _profile_rows(profile: WProfile):
    height = reconstruct_height(profile)
    return zip(height.radii, profile.w, height.u, height.up, height.upp)


def export_csv(obj, path) -> Path:
    """Write one profile or one sweep diagram as CSV; returns the path.

    Profiles (``WProfile`` or ``HeightProfile``) get the header
    ``r,w,u,up,upp``, one row per grid point, ascending in r.  Diagrams
    get ``lambda,s_min,s_mp,J_min,J_mp`` with empty cells where a
    branch is absent.  Output is deterministic: same object, same
    bytes.
    """
    path = Path(path)
    if isinstance(obj, WProfile):
        header, rows = PROFILE_HEADER, _profile_rows(obj)
    elif isinstance(obj, HeightProfile):
        header = PROFILE_HEADER
        rows = zip(obj.radii, obj.radii * obj.up, obj.u, obj.up, obj.upp)
    elif isinstance(obj, BifurcationDiagram):
        header = DIAGRAM_HEADER
        rows = (
            (p.lam, p.s_min, p.s_mp, p.energy_min, p.energy_mp)
            for p in obj.points
        )
    else:
        raise TypeError(
            "export_csv handles WProfile, HeightProfile or "
            "BifurcationDiagram, got %r" % type(obj).__name__)
    lines = [header]
    lines.extend(",".join(_cell(x) for x in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_profile_csv(path):
    """Columns of a profile CSV as arrays (r, w, u, up, upp)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 5:
        raise ValueError("%s: expected 5 columns (%s)" % (path, PROFILE_HEADER))
    return tuple(data[:, k] for k in range(5))


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # stable clip-path ids -> reproducible SVG bytes
    plt.rcParams["svg.hashsalt"] = "epitaxy"
    # keep labels as text elements, not outlines
    plt.rcParams["svg.fonttype"] = "none"
    return plt


def export_svg(obj, path, lam: float | None = None) -> Path:
    """Plot branch profiles or a sweep diagram; returns the path.

    A solved pair plots u(r) for the minimum branch in red and the
    mountain-pass branch in green with the amplitude in the title; a
    ``NoSolutions`` value (or None with ``lam`` given) produces labeled
    empty axes carrying a "no solutions" annotation; a diagram plots
    both slope branches against lambda in the same colors.
    """
    path = Path(path)
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    try:
        if isinstance(obj, BranchPair):
            h_min = reconstruct_height(obj.minimum.profile)
            h_mp = reconstruct_height(obj.mountain_pass.profile)
            ax.plot(h_min.radii, h_min.u, color="red", label="minimum")
            ax.plot(h_mp.radii, h_mp.u, color="green", label="mountain pass")
            ax.set_xlabel("r")
            ax.set_ylabel("u(r)")
            ax.set_title("lambda = %g" % obj.lam)
            ax.legend()
        elif isinstance(obj, BifurcationDiagram):
            pts = obj.points
            lams = [p.lam for p in pts]
            s_min = [p.s_min if p.s_min is not None else np.nan for p in pts]
            s_mp = [p.s_mp if p.s_mp is not None else np.nan for p in pts]
            ax.plot(lams, s_min, "o-", color="red", label="minimum")
            ax.plot(lams, s_mp, "o-", color="green", label="mountain pass")
            ax.set_xlabel("lambda")
            ax.set_ylabel("shooting slope s")
            ax.set_title("branches, %s edge" % obj.bc.value)
            ax.legend()
        elif obj is None or isinstance(obj, NoSolutions):
            if isinstance(obj, NoSolutions):
                lam = obj.lam
            ax.set_xlabel("r")
            ax.set_ylabel("u(r)")
            ax.set_title("lambda = %g" % lam if lam is not None else "")
            ax.annotate("no solutions", xy=(0.5, 0.5),
                        xycoords="axes fraction", ha="center", va="center")
        else:
            raise TypeError("export_svg handles BranchPair, BifurcationDiagram "
                            "or NoSolutions, got %r" % type(obj).__name__)
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return path


def spec_echo(spec: ProblemSpec) -> dict:
    """JSON-ready restatement of the generating parameters."""
    return {
        "bc": spec.bc.value,
        "lambda": spec.lam,
        "epsilon": spec.epsilon,
        "step": spec.step,
        "scan_range": spec.scan_range,
        "scan_points": spec.scan_points,
        "quadratic_term": spec.quadratic_term,
        "forcing": "constant 1" if spec.forcing.is_constant else "tabulated",
        "spec_hash": spec.spec_hash(),
    }


def write_summary(path, payload: dict) -> Path:
    """Machine-readable run summary; one JSON object per run."""
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
