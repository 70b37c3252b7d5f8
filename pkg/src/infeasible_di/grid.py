"""Uniform-grid representation of control functions on [0, 1].

A :class:`ControlGrid` stores ``n`` samples at the nodes ``t_i = i/(n-1)``
(both endpoints included).  All integrals use the composite trapezoid rule.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .exceptions import LengthMismatch, MultipleCrossings, NoCrossing
from .problem import BoundaryData

__all__ = [
    "ControlGrid",
    "nodes",
    "trapezoid_weights",
    "integrate",
    "integrate_weighted",
    "simulate",
    "extract_switch",
    "sup_norm_diff",
    "fraction_within",
    "write_grid_csv",
    "read_grid_csv",
]


@lru_cache(maxsize=16)
def _nodes(n: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)
    t.setflags(write=False)
    return t


@lru_cache(maxsize=16)
def _weights(n: int) -> np.ndarray:
    w = np.full(n, 1.0 / (n - 1))
    w[0] = w[-1] = 0.5 / (n - 1)
    w.setflags(write=False)
    return w


def nodes(n: int) -> np.ndarray:
    """Read-only node vector ``i/(n-1)``."""
    if n < 2:
        raise ValueError("a grid needs at least two nodes")
    return _nodes(n)


def trapezoid_weights(n: int) -> np.ndarray:
    """Read-only composite trapezoid weights for :func:`nodes`."""
    if n < 2:
        raise ValueError("a grid needs at least two nodes")
    return _weights(n)


@dataclass(frozen=True, eq=False)
class ControlGrid:
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("ControlGrid needs a 1-d array of at least two values")
        if not np.all(np.isfinite(v)):
            raise ValueError("ControlGrid values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def t(self) -> np.ndarray:
        return nodes(self.n)

    @classmethod
    def from_function(cls, f: Callable, n: int) -> "ControlGrid":
        return cls(np.broadcast_to(f(nodes(n)), (n,)))

    @classmethod
    def zeros(cls, n: int) -> "ControlGrid":
        return cls(np.zeros(n))

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"ControlGrid(n={self.n})"


def integrate(g: ControlGrid) -> float:
    """Trapezoid approximation of the integral of ``g`` over [0, 1]."""
    return float(trapezoid_weights(g.n) @ g.values)


def integrate_weighted(g: ControlGrid) -> float:
    """Trapezoid approximation of ``int_0^1 (1 - t) g(t) dt``."""
    w = trapezoid_weights(g.n)
    return float((w * (1.0 - g.t)) @ g.values)


def simulate(g: ControlGrid, b: BoundaryData) -> Tuple[float, float]:
    """Terminal ``(position, velocity)`` of the double integrator driven by ``g``.

    Velocity and position are both obtained by cumulative trapezoid
    integration starting from ``(b.s0, b.v0)``.
    """
    t = g.t
    x2 = b.v0 + cumulative_trapezoid(g.values, t, initial=0.0)
    x1 = b.s0 + cumulative_trapezoid(x2, t, initial=0.0)
    return float(x1[-1]), float(x2[-1])


def extract_switch(g: ControlGrid, a: float) -> float:
    """Switching time of a bang-bang shaped grid.

    Finds the single index pair where the sign changes (nonnegative
    versus negative) and returns the zero of the straight line through
    those two nodes.

    Raises
    ------
    NoCrossing
        If all values lie on one side of zero.
    MultipleCrossings
        If the sign changes more than once.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    u = g.values
    nonneg = u >= 0.0
    idx = np.flatnonzero(nonneg[1:] != nonneg[:-1])
    if idx.size == 0:
        raise NoCrossing("control does not change sign")
    if idx.size > 1:
        raise MultipleCrossings(f"control changes sign {idx.size} times")
    i = int(idx[0])
    t = g.t
    u0, u1 = u[i], u[i + 1]
    return float(t[i] - u0 * (t[i + 1] - t[i]) / (u1 - u0))


def _check_pair(g1: ControlGrid, g2: ControlGrid):
    if g1.n != g2.n:
        raise LengthMismatch(f"grid sizes differ: {g1.n} vs {g2.n}")


def sup_norm_diff(g1: ControlGrid, g2: ControlGrid) -> float:
    _check_pair(g1, g2)
    return float(np.max(np.abs(g1.values - g2.values)))


def fraction_within(g1: ControlGrid, g2: ControlGrid, eps: float) -> float:
    """Fraction of nodes where ``|g1 - g2| <= eps``."""
    _check_pair(g1, g2)
    return float(np.count_nonzero(np.abs(g1.values - g2.values) <= eps)) / g1.n


def write_grid_csv(g: ControlGrid, path) -> None:
    """Write ``t,u`` rows with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        fh.write("t,u\n")
        for ti, ui in zip(g.t, g.values):
            fh.write(f"{ti:.17g},{ui:.17g}\n")


def read_grid_csv(path) -> ControlGrid:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return ControlGrid(np.array([float(r["u"]) for r in rows]))
