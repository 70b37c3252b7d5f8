"""Projections onto the boundary-consistent affine set and onto the box.

The affine set ``A`` contains the controls that steer the double integrator
from ``(s0, v0)`` to ``(sf, vf)``; membership is the pair of linear
conditions ``int u = vf - v0`` and ``int (1 - t) u = sf - s0 - v0``.  The
projection adds an affine correction ``c1 t + c2``.

On a grid the two integrals become trapezoid sums.  The correction is
computed from the trapezoid Gram matrix of ``{1, 1 - t}`` so that the
discrete operator is an exact orthogonal projection for the
trapezoid-weighted inner product (idempotent to round-off); its
coefficients differ from the continuous closed form ``12(...) - 6(...)``
only by O(h^2).
"""
from __future__ import annotations

from typing import Tuple

import numpy as np

from .analytic import GapLine
from .grid import ControlGrid, nodes, trapezoid_weights
from .problem import BoundaryData

__all__ = ["project_A", "project_B", "affine_correction", "clip_box"]


def affine_correction(values: np.ndarray, b: BoundaryData) -> Tuple[float, float]:
    """Coefficients ``(c1, c2)`` of the correction that maps ``values`` into ``A``."""
    n = values.size
    t = nodes(n)
    w = trapezoid_weights(n)
    wt = w * (1.0 - t)
    r0 = (b.vf - b.v0) - w @ values
    r1 = (b.sf - b.s0 - b.v0) - wt @ values
    # Gram matrix of {1, 1 - t}; g00 = 1 and g01 = 1/2 are exact for trapezoid
    g00 = w.sum()
    g01 = wt.sum()
    g11 = wt @ (1.0 - t)
    det = g00 * g11 - g01 * g01
    alpha = (g11 * r0 - g01 * r1) / det
    beta = (g00 * r1 - g01 * r0) / det
    # alpha + beta (1 - t) = -beta t + (alpha + beta)
    return float(-beta), float(alpha + beta)


def project_A(g: ControlGrid, b: BoundaryData) -> Tuple[ControlGrid, GapLine]:
    """Project ``g`` onto the affine set and return the correction line."""
    c1, c2 = affine_correction(g.values, b)
    return ControlGrid(g.values + c1 * g.t + c2), GapLine(c1, c2)


def clip_box(values: np.ndarray, a: float, out=None) -> np.ndarray:
    return np.clip(values, -a, a, out=out)


def project_B(g: ControlGrid, a: float) -> ControlGrid:
    """Pointwise clamp to ``[-a, a]``."""
    if not a > 0:
        raise ValueError("a must be positive")
    return ControlGrid(clip_box(g.values, a))
