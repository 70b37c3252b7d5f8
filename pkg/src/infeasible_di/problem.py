"""Problem data for the control-constrained double integrator on [0, 1].

The dynamics are ``x1' = x2, x2' = u`` with ``x1(0) = s0, x1(1) = sf,
x2(0) = v0, x2(1) = vf`` and the box constraint ``|u(t)| <= a``.  This
module computes the critical bound ``a_c`` below which the problem is
infeasible and classifies an instance against it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .exceptions import DegenerateDenominator, QuadraticRootOutsideUnitInterval

__all__ = [
    "BoundaryData",
    "ProblemInstance",
    "CriticalResult",
    "Feasibility",
    "FeasibilityClass",
    "CASE_STUDY",
    "boundary_case",
    "critical_bound",
    "classify",
]

# relative band used to decide the exact-equality branches
CASE_RTOL = 1e-12


@dataclass(frozen=True)
class BoundaryData:
    """Initial/terminal position and velocity; the horizon is [0, 1]."""

    s0: float
    sf: float
    v0: float
    vf: float

    def __post_init__(self):
        for name in ("s0", "sf", "v0", "vf"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.s0), abs(self.sf), abs(self.v0), abs(self.vf))

    @property
    def displacement_defect(self) -> float:
        """``sf - s0 - (v0 + vf)/2``; zero when the constant-acceleration
        trajectory meets both boundary conditions."""
        return self.sf - self.s0 - 0.5 * (self.v0 + self.vf)


#: The worked example used throughout: start at the origin moving with unit
#: velocity, stop at the origin.
CASE_STUDY = BoundaryData(s0=0.0, sf=0.0, v0=1.0, vf=0.0)


@dataclass(frozen=True)
class ProblemInstance:
    boundary: BoundaryData
    a: float

    def __post_init__(self):
        a = float(self.a)
        if not (math.isfinite(a) and a > 0):
            raise ValueError(f"control bound a must be positive and finite, got {a!r}")
        object.__setattr__(self, "a", a)


@dataclass(frozen=True)
class CriticalResult:
    a_c: float
    t_c: Optional[float]
    case_tag: str


class Feasibility(enum.Enum):
    FEASIBLE = "feasible"
    CRITICALLY_FEASIBLE = "critically_feasible"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class FeasibilityClass:
    kind: Feasibility
    a_c: float

    @property
    def infeasible(self) -> bool:
        return self.kind is Feasibility.INFEASIBLE


def boundary_case(b: BoundaryData) -> str:
    """Return the branch tag for the boundary data.

    One of ``"a_i"`` (generic), ``"a_ii"`` (equal end velocities),
    ``"b"`` (constant control suffices up to the bound) or
    ``"degenerate"`` (``u = 0`` is feasible).
    """
    band = CASE_RTOL * b.scale
    defect_zero = abs(b.displacement_defect) <= band
    velocities_equal = abs(b.v0 - b.vf) <= band
    if defect_zero:
        return "degenerate" if velocities_equal else "b"
    return "a_ii" if velocities_equal else "a_i"


def _quadratic_roots(qa, qb, qc):
    disc = qb * qb - 4.0 * qa * qc
    # the discriminant is a sum of squares for this quadratic; clamp round-off
    sq = math.sqrt(max(disc, 0.0))
    q = -0.5 * (qb + math.copysign(sq, qb))
    if q == 0.0:
        return (0.0, 0.0)
    return (q / qa, qc / q)


def critical_bound(b: BoundaryData) -> CriticalResult:
    """Smallest control bound for which the problem is feasible.

    Parameters
    ----------
    b : BoundaryData

    Returns
    -------
    CriticalResult
        ``t_c`` is set only in the generic branch ``"a_i"``, where it is
        the root in [0, 1] of
        ``(vf - v0) t^2 + 2 (sf - s0 - vf) t + (v0 + vf)/2 - (sf - s0) = 0``
        and ``a_c = |vf - v0| / |2 t_c - 1|``.  When both roots lie in
        [0, 1] the one with the smaller ``a_c`` is returned.
    """
    tag = boundary_case(b)
    if tag == "degenerate":
        return CriticalResult(0.0, None, tag)
    if tag == "b":
        return CriticalResult(abs(b.vf - b.v0), None, tag)
    if tag == "a_ii":
        return CriticalResult(4.0 * abs(b.vf + b.s0 - b.sf), None, tag)

    dv = b.vf - b.v0
    roots = _quadratic_roots(
        dv, 2.0 * (b.sf - b.s0 - b.vf), 0.5 * (b.v0 + b.vf) - (b.sf - b.s0)
    )
    slack = 1e-12
    admissible = [min(max(t, 0.0), 1.0) for t in roots if -slack <= t <= 1.0 + slack]
    if not admissible:
        raise QuadraticRootOutsideUnitInterval(
            f"critical switching-time roots {roots} lie outside [0, 1]"
        )
    best = None
    for t_c in admissible:
        denom = abs(2.0 * t_c - 1.0)
        if denom <= 1e-12:
            continue
        a_c = abs(dv) / denom
        if best is None or a_c < best[0]:
            best = (a_c, t_c)
    if best is None:
        raise DegenerateDenominator("critical switching time is 1/2; a_c undefined")
    return CriticalResult(best[0], best[1], tag)


def classify(p: ProblemInstance, tol: float = 1e-9) -> FeasibilityClass:
    """Compare ``p.a`` with the critical bound, using an absolute band ``tol``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    a_c = critical_bound(p.boundary).a_c
    if p.a < a_c - tol:
        kind = Feasibility.INFEASIBLE
    elif abs(p.a - a_c) <= tol:
        kind = Feasibility.CRITICALLY_FEASIBLE
    else:
        kind = Feasibility.FEASIBLE
    return FeasibilityClass(kind, a_c)
