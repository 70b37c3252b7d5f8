"""Relaxed Douglas-Rachford iteration for the infeasible double integrator.

With ``f`` the indicator of the affine set ``A`` and ``g`` the indicator of
the box plus ``||u||^2 / 2``, the proximal steps reduce to the projections
``P_A`` and ``u -> P_B(gamma u)`` with ``gamma = 1 / (tau + 1)``.  One sweep
is::

    u_tilde = P_B(gamma * u)
    u_hat   = P_A(2 * u_tilde - u)
    u      += 2 * lam * (u_hat - u_tilde)

When ``A`` and the box do not intersect the governing sequence ``u`` drifts
off to infinity along an affine direction while the shadow ``u_tilde``
converges.  The default stopping rule therefore looks at consecutive
shadows: stop once a fraction ``frac`` of the nodes moved by at most
``eps``.  ``stop_on="iterate"`` applies the same test to ``u`` itself.
"""
from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np

from .analytic import GapLine
from .exceptions import DoubleIntegratorError
from .grid import ControlGrid, extract_switch, nodes
from .problem import ProblemInstance
from .projections import affine_correction, project_A

__all__ = ["DRConfig", "DRReport", "SweepRow", "dr_solve", "sweep"]

STOP_RULES = ("shadow", "iterate")


@dataclass(frozen=True)
class DRConfig:
    gamma: float = 0.95
    lam: float = 0.5
    eps: float = 1e-6
    frac: float = 0.999
    max_iter: int = 10_000
    n: int = 1000
    u0: Optional[ControlGrid] = None
    stop_on: str = "shadow"

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"lam must lie in (0, 1), got {self.lam}")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not 0.0 < self.frac <= 1.0:
            raise ValueError("frac must lie in (0, 1]")
        if self.max_iter < 0:
            raise ValueError("max_iter must be nonnegative")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.u0 is not None and self.u0.n != self.n:
            raise ValueError(f"u0 has {self.u0.n} nodes, expected {self.n}")
        if self.stop_on not in STOP_RULES:
            raise ValueError(f"stop_on must be one of {STOP_RULES}")

    @property
    def tau(self) -> float:
        return 1.0 / self.gamma - 1.0


@dataclass
class DRReport:
    iterations: int
    converged: bool
    u_tilde: ControlGrid
    u_hat: ControlGrid
    gap: GapLine
    ts_estimate: Optional[float]
    wall_time: float
    switch_error: Optional[str] = None
    last_correction: Optional[GapLine] = None
    hat_step: Optional[float] = None
    u_final: Optional[ControlGrid] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        """JSON-ready summary (grids are left out)."""
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "ts_estimate": self.ts_estimate,
            "switch_error": self.switch_error,
            "gap": {"c1": self.gap.c1, "c2": self.gap.c2},
            "wall_time_s": self.wall_time,
        }


def dr_solve(p: ProblemInstance, cfg: DRConfig = DRConfig()) -> DRReport:
    """Run the relaxed Douglas-Rachford iteration on ``p``.

    Non-convergence is not an error: the report comes back with
    ``converged=False`` after ``cfg.max_iter`` sweeps.

    Returns
    -------
    DRReport
        ``u_tilde`` is the final box iterate, ``gap`` the affine line
        ``P_A(u_tilde) - u_tilde`` and ``ts_estimate`` the sign change of
        ``u_tilde`` (``None`` with ``switch_error`` set if there is no
        single crossing).
    """
    a, b = p.a, p.boundary
    n = cfg.n
    t = nodes(n)
    u = np.zeros(n) if cfg.u0 is None else cfg.u0.values.copy()
    gamma, two_lam, eps = cfg.gamma, 2.0 * cfg.lam, cfg.eps
    need = cfg.frac * n
    shadow_rule = cfg.stop_on == "shadow"

    u_tilde = u_hat = prev_tilde = prev_hat = None
    line = None
    hat_step = None
    k = 0
    converged = False
    start = time.perf_counter()
    while k < cfg.max_iter:
        u_tilde = np.clip(gamma * u, -a, a)
        u_minus = 2.0 * u_tilde - u
        c1, c2 = affine_correction(u_minus, b)
        u_hat = u_minus + c1 * t + c2
        u_next = u + two_lam * (u_hat - u_tilde)
        k += 1
        if prev_hat is not None:
            hat_step = float(np.linalg.norm(u_hat - prev_hat))
        if shadow_rule:
            stop = prev_tilde is not None and (
                np.count_nonzero(np.abs(u_tilde - prev_tilde) <= eps) >= need
            )
        else:
            stop = np.count_nonzero(np.abs(u_next - u) <= eps) >= need
        u = u_next
        line = GapLine(c1, c2)
        if stop:
            converged = True
            break
        prev_tilde, prev_hat = u_tilde, u_hat
    wall = time.perf_counter() - start

    if k == 0:
        u_tilde = np.clip(gamma * u, -a, a)
        u_minus = 2.0 * u_tilde - u
        c1, c2 = affine_correction(u_minus, b)
        u_hat = u_minus + c1 * t + c2
        line = GapLine(c1, c2)

    shadow = ControlGrid(u_tilde)
    _, gap = project_A(shadow, b)
    ts, err = None, None
    try:
        ts = extract_switch(shadow, a)
    except DoubleIntegratorError as exc:
        err = f"{type(exc).__name__}: {exc}"
    return DRReport(
        iterations=k,
        converged=converged,
        u_tilde=shadow,
        u_hat=ControlGrid(u_hat),
        gap=gap,
        ts_estimate=ts,
        wall_time=wall,
        switch_error=err,
        last_correction=line,
        hat_step=hat_step,
        u_final=ControlGrid(u),
    )


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    lam: float
    iterations: int
    converged: bool


def sweep(
    p: ProblemInstance,
    gammas: Sequence[float],
    lambdas: Sequence[float],
    cfg: DRConfig = DRConfig(),
    jobs: int = 1,
) -> List[SweepRow]:
    """One :func:`dr_solve` per ``(gamma, lam)`` pair, gamma-major order.

    Everything except the two parameters is taken from ``cfg``.  Cells are
    independent, so ``jobs > 1`` runs them on a thread pool; the row order
    does not depend on scheduling.
    """
    pairs = list(itertools.product(gammas, lambdas))
    for g, lam in pairs:
        if not (0 < g < 1 and 0 < lam < 1):
            raise ValueError(f"sweep parameters must lie in (0, 1): gamma={g}, lam={lam}")

    def cell(pair):
        g, lam = pair
        rep = dr_solve(p, replace(cfg, gamma=float(g), lam=float(lam)))
        return SweepRow(float(g), float(lam), rep.iterations, rep.converged)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(cell, pairs))
    return [cell(pair) for pair in pairs]
