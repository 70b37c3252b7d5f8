"""Closed-form best approximation control for the infeasible double integrator.

For ``a < a_c`` the box-constrained control closest (in L2) to the affine
set of boundary-consistent controls is bang-bang with at most one switch,
and the gap ``u_A - u_B`` is the affine function ``c1 t + c2``.  In the
generic case the switching time ``ts`` and slope ``c1`` solve a 2x2
polynomial system, which is handled here with Newton's method or with the
generalized Newton method that applies ``s(y) = (y1**3, y2)`` to the
residual first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import (
    Ambiguous,
    DegenerateDenominator,
    NoValidRoot,
    NotConverged,
    RegimeError,
    SingularJacobian,
)
from .problem import BoundaryData, ProblemInstance, boundary_case, classify

__all__ = [
    "GapLine",
    "TwoPiece",
    "Constant",
    "NewtonConfig",
    "SolveTrace",
    "residual",
    "residual_jacobian",
    "newton_iterate",
    "newton_solve",
    "newton_iteration_counts",
    "best_approx",
    "asymptotic_ts",
    "control_eval",
]

PLAIN = "plain"
GENERALIZED = "generalized"

# relative determinant threshold below which a 2x2 step is treated as singular
SINGULAR_RTOL = 1e-14


@dataclass(frozen=True)
class GapLine:
    """Affine gap function ``v(t) = c1 t + c2``."""

    c1: float
    c2: float

    def __call__(self, t):
        return self.c1 * np.asarray(t, dtype=float) + self.c2


@dataclass(frozen=True)
class TwoPiece:
    """``u_B = r`` on ``[0, ts)`` and ``-r`` on ``[ts, 1]``."""

    r: float
    ts: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t < self.ts, self.r, -self.r)


@dataclass(frozen=True)
class Constant:
    r: float

    def __call__(self, t):
        return np.full(np.shape(t), self.r, dtype=float)


BestApproxControl = Union[TwoPiece, Constant]


@dataclass(frozen=True)
class NewtonConfig:
    max_iter: int = 40
    tol: float = 1e-13
    method: str = PLAIN

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.method not in (PLAIN, GENERALIZED):
            raise ValueError(f"method must be {PLAIN!r} or {GENERALIZED!r}")


@dataclass
class SolveTrace:
    iterations: int = 0
    residual_history: List[float] = field(default_factory=list)
    converged: bool = False
    failure: Optional[str] = None


def residual(ts, c1, r, b: BoundaryData):
    """Residuals ``(F1, F2)`` of the switching-time/slope system.

    Works elementwise on arrays as well as on scalars.
    """
    f1 = (2.0 * r - c1) * ts + 0.5 * c1 - b.vf + b.v0 - r
    f2 = (
        (r - c1) * ts * ts
        + (b.v0 - b.vf + c1 - r) * ts
        - c1 / 3.0
        + 0.5 * r
        + b.vf
        + b.s0
        - b.sf
    )
    return f1, f2


def _jacobian_entries(ts, c1, r, b: BoundaryData):
    j11 = 2.0 * r - c1
    j12 = 0.5 - ts
    j21 = 2.0 * (r - c1) * ts + (b.v0 - b.vf + c1 - r)
    j22 = -ts * ts + ts - 1.0 / 3.0
    return j11, j12, j21, j22


def residual_jacobian(ts, c1, r, b: BoundaryData) -> np.ndarray:
    """Jacobian of :func:`residual` with respect to ``(ts, c1)``."""
    j11, j12, j21, j22 = _jacobian_entries(ts, c1, r, b)
    return np.array([[j11, j12], [j21, j22]], dtype=float)


def _solve2(j11, j12, j21, j22, g1, g2):
    """Explicit-inverse solve of a 2x2 system; also returns a singular mask."""
    det = j11 * j22 - j12 * j21
    scale = np.hypot(j11, j12) * np.hypot(j21, j22)
    singular = np.abs(det) <= SINGULAR_RTOL * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        d_ts = (j22 * g1 - j12 * g2) / det
        d_c1 = (j11 * g2 - j21 * g1) / det
    return d_ts, d_c1, singular


def _newton_step(ts, c1, f1, f2, r, b, generalized):
    """One Newton (or generalized Newton) update.

    Returns ``(ts_new, c1_new, status)`` where status is 0 for a regular
    step, 1 when the generalized step fell back to a plain step, and 2
    when the step could not be taken.
    """
    j11, j12, j21, j22 = _jacobian_entries(ts, c1, r, b)
    p_ts, p_c1, p_sing = _solve2(j11, j12, j21, j22, f1, f2)
    if not generalized:
        status = np.where(p_sing, 2, 0)
        return ts - p_ts, c1 - p_c1, status
    w = 3.0 * f1 * f1
    g_ts, g_c1, g_sing = _solve2(w * j11, w * j12, j21, j22, f1 * f1 * f1, f2)
    d_ts = np.where(g_sing, p_ts, g_ts)
    d_c1 = np.where(g_sing, p_c1, g_c1)
    status = np.where(g_sing, np.where(p_sing, 2, 1), 0)
    return ts - d_ts, c1 - d_c1, status


def newton_iterate(
    cfg: NewtonConfig, r: float, b: BoundaryData, y0: Sequence[float]
) -> Tuple[Tuple[float, float], SolveTrace]:
    """Run (generalized) Newton from ``y0 = (ts, c1)`` without raising.

    Convergence is always judged on the sup-norm of the original residual
    ``F``, also for the generalized variant.  The trace records why the
    run stopped when it did not converge.
    """
    ts, c1 = np.float64(y0[0]), np.float64(y0[1])
    trace = SolveTrace()
    generalized = cfg.method == GENERALIZED
    while True:
        f1, f2 = residual(ts, c1, r, b)
        res = float(max(abs(f1), abs(f2)))
        if not (math.isfinite(res) and math.isfinite(ts) and math.isfinite(c1)):
            trace.residual_history.append(res)
            trace.failure = "non-finite iterate"
            break
        trace.residual_history.append(res)
        if res <= cfg.tol:
            trace.converged = True
            break
        if trace.iterations >= cfg.max_iter:
            trace.failure = "iteration cap reached"
            break
        ts_new, c1_new, status = _newton_step(ts, c1, f1, f2, r, b, generalized)
        if status == 2:
            trace.failure = "singular Jacobian"
            break
        ts, c1 = ts_new, c1_new
        trace.iterations += 1
    return (float(ts), float(c1)), trace


def newton_solve(
    cfg: NewtonConfig, r: float, b: BoundaryData, y0: Sequence[float]
) -> Tuple[Tuple[float, float], SolveTrace]:
    """Like :func:`newton_iterate` but raise on failure.

    Raises
    ------
    SingularJacobian
        If a step meets a singular Jacobian (after the generalized-step
        fallback, if any).
    NotConverged
        If ``cfg.max_iter`` steps do not bring the residual below ``cfg.tol``
        or an iterate overflows.
    """
    y, trace = newton_iterate(cfg, r, b, y0)
    if trace.converged:
        return y, trace
    if trace.failure == "singular Jacobian":
        raise SingularJacobian(f"singular Jacobian at (ts, c1) = {y}")
    raise NotConverged(f"Newton did not converge from {tuple(y0)}: {trace.failure}", trace)


def newton_iteration_counts(
    ts0, c10, r: float, b: BoundaryData, cfg: NewtonConfig
) -> np.ndarray:
    """Vectorized iteration counts for many starting points at once.

    Each entry is the number of steps after which the residual first drops
    to ``cfg.tol``, or -1 if that does not happen within ``cfg.max_iter``
    steps.  Every element follows exactly the arithmetic of
    :func:`newton_iterate`, so re-running a single start reproduces its
    count.
    """
    ts = np.array(ts0, dtype=float, copy=True)
    c1 = np.array(c10, dtype=float, copy=True)
    ts, c1 = np.broadcast_arrays(ts, c1)
    ts, c1 = ts.copy(), c1.copy()
    counts = np.full(ts.shape, -1, dtype=np.int64)
    active = np.ones(ts.shape, dtype=bool)
    generalized = cfg.method == GENERALIZED
    with np.errstate(all="ignore"):
        for k in range(cfg.max_iter + 1):
            f1, f2 = residual(ts, c1, r, b)
            res = np.maximum(np.abs(f1), np.abs(f2))
            finite = np.isfinite(res) & np.isfinite(ts) & np.isfinite(c1)
            done = active & finite & (res <= cfg.tol)
            counts[done] = k
            active &= finite & ~done
            if k == cfg.max_iter or not active.any():
                break
            ts_new, c1_new, status = _newton_step(ts, c1, f1, f2, r, b, generalized)
            active &= status != 2
            ts = np.where(active, ts_new, ts)
            c1 = np.where(active, c1_new, c1)
    return counts


def asymptotic_ts(b: BoundaryData) -> Tuple[float, float, float]:
    """Limits of ``(ts, c1, c2)`` as the control bound ``a`` tends to zero.

    Raises
    ------
    DegenerateDenominator
        When ``sf - s0 = (v0 + vf)/2``.
    """
    d = b.sf - b.s0
    num = 2.0 * b.v0 + b.vf - 3.0 * d
    den = 3.0 * (b.v0 + b.vf) - 6.0 * d
    if abs(den) <= 1e-12 * b.scale:
        raise DegenerateDenominator("sf - s0 = (v0 + vf)/2: switching-time limit undefined")
    ts = num / den
    if boundary_case(b) == "a_ii":
        # 1 - 2 ts vanishes; use the a -> 0 limit of the equal-velocity slope
        c1 = 12.0 * (b.vf + b.s0 - b.sf)
    else:
        # 1 - 2 ts = (den - 2 num) / den, kept as a ratio of exact-ish terms
        slack = den - 2.0 * num
        if abs(slack) <= 1e-12 * abs(den):
            raise DegenerateDenominator("limiting switching time is 1/2 with v0 != vf")
        c1 = 2.0 * (b.vf - b.v0) * den / slack
    c2 = -c1 * num / den
    return ts, c1, c2


def _default_starts(b: BoundaryData) -> List[Tuple[float, float]]:
    starts = []
    try:
        ts, c1, _ = asymptotic_ts(b)
        starts.append((ts, c1))
    except DegenerateDenominator:
        pass
    starts.append((0.5, 0.0))
    # deterministic coarse net, only reached if the warm starts fail
    for ts in (0.25, 0.75, 0.1, 0.9):
        for c1 in (1.0, -1.0, 5.0, -5.0, 20.0, -20.0):
            starts.append((ts, c1))
    return starts


def _admissible(ts, c1, r) -> bool:
    return -1e-12 <= ts <= 1.0 + 1e-12 and c1 * r < 0


def best_approx(
    p: ProblemInstance,
    cfg: Optional[NewtonConfig] = None,
    y0: Optional[Sequence[float]] = None,
):
    """Best approximation control and gap line of an infeasible instance.

    Parameters
    ----------
    p : ProblemInstance
        Must be infeasible (``a < a_c``).
    cfg : NewtonConfig, optional
        Used in the generic case, where both signs ``r = +a`` and ``r = -a``
        are tried and a root is kept only if ``0 <= ts <= 1`` and
        ``sign(c1) = -sign(r)``.
    y0 : (ts, c1), optional
        Initial guess for the generic case.  By default the small-``a``
        limit is tried first, followed by a fixed set of fallback starts.

    Returns
    -------
    control : TwoPiece or Constant
    gap : GapLine
    trace : SolveTrace
    """
    cfg = cfg or NewtonConfig()
    fc = classify(p)
    if not fc.infeasible:
        raise RegimeError(f"problem is {fc.kind.value} (a={p.a}, a_c={fc.a_c}); no gap to close")
    b, a = p.boundary, p.a
    tag = boundary_case(b)

    if tag == "b":
        r = math.copysign(a, b.vf - b.v0)
        c2 = b.vf - b.v0 - r
        return Constant(r), GapLine(0.0, c2), SolveTrace(converged=True)

    if tag == "a_ii":
        k = 4.0 * (b.vf + b.s0 - b.sf)
        r = a if k < -a else -a
        c1 = 3.0 * r + 3.0 * k
        f1, f2 = residual(0.5, c1, r, b)
        trace = SolveTrace(0, [max(abs(f1), abs(f2))], True)
        return TwoPiece(r, 0.5), GapLine(c1, -0.5 * c1), trace

    starts = [tuple(y0)] if y0 is not None else _default_starts(b)
    found = []
    for r in (a, -a):
        for start in starts:
            (ts, c1), trace = newton_iterate(cfg, r, b, start)
            if trace.converged and _admissible(ts, c1, r):
                found.append((r, min(max(ts, 0.0), 1.0), c1, trace))
                break
    if not found:
        raise NoValidRoot(f"no admissible switching time for a={a}, boundary={b}")
    if len(found) > 1:
        roots = [(r, ts, c1) for r, ts, c1, _ in found]
        raise Ambiguous(f"both control signs give admissible roots: {roots}")
    r, ts, c1, trace = found[0]
    return TwoPiece(r, ts), GapLine(c1, -c1 * ts), trace


def control_eval(c: BestApproxControl, g: GapLine, t):
    """Evaluate ``(u_B(t), u_A(t))`` with ``u_A = u_B + v``."""
    u_b = c(t)
    return u_b, u_b + g(t)
