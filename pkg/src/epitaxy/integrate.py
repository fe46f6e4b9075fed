"""Backward fixed-step Runge-Kutta integration of the reduced equation.

The shot starts from the edge values (w(1), w'(1)) given by
``final_conditions`` and walks down to the inner cutoff r = eps with the
classical fourth-order scheme at constant step h; the last partial step
is shortened so that the grid lands on eps exactly.  Shots whose state
exceeds 10^12 in magnitude (or turns non-finite) are reported as
:class:`Blowup` — a perfectly ordinary outcome for shooting parameters
far from a root, not an error.

Trajectories are returned in ascending radius order, so ``radii[0] ==
eps`` and ``radii[-1] == 1`` hold exactly, which downstream quadrature
relies on.  Two runs with the same spec and shooting parameter produce
bitwise-identical profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from ._kernels import BLOWUP_THRESHOLD
from .model import BoundaryKind, ProblemSpec, final_conditions

__all__ = [
    "Blowup",
    "WProfile",
    "rk4_step",
    "integrate_backward",
    "descending_radii",
    "terminal_w",
    "BLOWUP_THRESHOLD",
]


@dataclass(frozen=True)
class Blowup:
    """Marker value for a shot that escaped before reaching eps."""

    s: float
    radius_reached: float


@dataclass(frozen=True)
class WProfile:
    """One integrated trajectory of w = r u' on the ascending grid."""

    radii: np.ndarray
    w: np.ndarray
    wp: np.ndarray
    spec_hash: str

    def __post_init__(self):
        n = len(self.radii)
        if n < 2 or len(self.w) != n or len(self.wp) != n:
            raise ValueError("profile arrays must share a length of at least 2")
        if not (np.all(np.isfinite(self.w)) and np.all(np.isfinite(self.wp))):
            raise ValueError("profile values must be finite")
        if np.any(np.diff(self.radii) <= 0.0):
            raise ValueError("radii must be strictly increasing")


def rk4_step(state, h_signed, rhs):
    """One classical Runge-Kutta step for the system (w, w')' = (w', rhs).

    Parameters
    ----------
    state : (r, w, wp) triple.
    h_signed : step, negative when integrating towards the origin; both
        r and r + h_signed must lie in (0, 1].
    rhs : callable (r, w, wp) -> w''.

    Returns the advanced triple (r + h_signed, w, wp).  Raises
    OverflowError if the result turns non-finite.
    """
    r, w, wp = state
    h = h_signed
    if not (0.0 < r <= 1.0 and 0.0 < r + h <= 1.0):
        raise ValueError("rk4_step operates inside (0, 1]")
    k1w = wp
    k1p = rhs(r, w, wp)
    k2w = wp + 0.5 * h * k1p
    k2p = rhs(r + 0.5 * h, w + 0.5 * h * k1w, wp + 0.5 * h * k1p)
    k3w = wp + 0.5 * h * k2p
    k3p = rhs(r + 0.5 * h, w + 0.5 * h * k2w, wp + 0.5 * h * k2p)
    k4w = wp + h * k3p
    k4p = rhs(r + h, w + h * k3w, wp + h * k3p)
    w2 = w + h * (k1w + 2.0 * (k2w + k3w) + k4w) / 6.0
    wp2 = wp + h * (k1p + 2.0 * (k2p + k3p) + k4p) / 6.0
    if not (math.isfinite(w2) and math.isfinite(wp2)):
        raise OverflowError("non-finite intermediate value in rk4_step")
    return (r + h, w2, wp2)


def descending_radii(spec: ProblemSpec) -> np.ndarray:
    """Grid nodes 1, 1-h, 1-2h, ..., eps walked by the integrator.

    The first node is exactly 1.0 and the last exactly spec.epsilon; the
    final cell is shorter than h whenever h does not divide 1 - eps.
    """
    h = spec.step
    eps = spec.epsilon
    k_full = int(math.floor((1.0 - eps) / h))
    nodes = 1.0 - h * np.arange(k_full + 1, dtype=float)
    # floor can overshoot by one cell through rounding
    while nodes[-1] <= eps:
        nodes = nodes[:-1]
    if nodes[-1] > eps:
        nodes = np.append(nodes, eps)
    return nodes


@lru_cache(maxsize=64)
def _stage_tables(spec: ProblemSpec):
    """Per-cell stage data for the kernels: signed steps, inverse radii
    and lam*F(r) at the left node, cell midpoint and right node."""
    nodes = descending_radii(spec)
    hs = np.diff(nodes)
    r0 = nodes[:-1]
    rm = r0 + 0.5 * hs
    r1 = nodes[1:]
    lam = spec.lam
    cumulative = spec.forcing.cumulative
    tables = (
        hs,
        1.0 if spec.quadratic_term else 0.0,
        1.0 / r0,
        1.0 / rm,
        1.0 / r1,
        lam * np.asarray(cumulative(r0)),
        lam * np.asarray(cumulative(rm)),
        lam * np.asarray(cumulative(r1)),
    )
    for arr in tables[2:]:
        arr.setflags(write=False)
    return nodes, tables


def integrate_backward(spec: ProblemSpec, s: float):
    """Integrate one shot; returns a :class:`WProfile` or :class:`Blowup`."""
    nodes, tables = _stage_tables(spec)
    w1, wp1 = final_conditions(spec.bc, s)
    w, wp, ok, stop = _kernels._run_trajectory(*tables, w1, wp1)
    if not ok:
        return Blowup(s=float(s), radius_reached=float(nodes[stop]))
    return WProfile(
        radii=nodes[::-1].copy(),
        w=w[::-1].copy(),
        wp=wp[::-1].copy(),
        spec_hash=spec.spec_hash(),
    )


def final_conditions_coefficients(bc: BoundaryKind):
    """Coefficients of the affine map s -> (w(1), w'(1)) for the kernels."""
    bw, bp = final_conditions(bc, 0.0)
    w1, p1 = final_conditions(bc, 1.0)
    return w1 - bw, bw, p1 - bp, bp


def terminal_w(spec: ProblemSpec, s_values):
    """Terminal w(eps) for a batch of shooting parameters (no storage).

    Returns (w_eps, ok, radius_reached); entries with ok False blew up
    at radius_reached and carry a meaningless w_eps.
    """
    nodes, tables = _stage_tables(spec)
    aw, bw, ap, bp = final_conditions_coefficients(spec.bc)
    s_values = np.asarray(s_values, dtype=float)
    w_eps, ok, stop = _kernels._scan_final_w(*tables, s_values, aw, bw, ap, bp)
    return w_eps, ok, nodes[stop]
