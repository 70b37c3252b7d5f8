"""Iteration-count portraits of Newton's method over a plane of initial guesses."""
from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .analytic import PLAIN, NewtonConfig, newton_iteration_counts
from .exceptions import RegimeError
from .problem import ProblemInstance, classify

__all__ = [
    "PortraitSpec",
    "PortraitGrid",
    "portrait",
    "write_portrait_csv",
    "read_portrait_csv",
    "write_portrait_pgm",
    "DEFAULT_TS_RANGE",
    "DEFAULT_C1_RANGE",
]

DEFAULT_TS_RANGE = (-0.5, 1.5)
DEFAULT_C1_RANGE = (-5.0, 10.0)


@dataclass(frozen=True)
class PortraitSpec:
    """Rectangle of starting points ``(ts, c1)`` sampled at cell centres.

    ``resolution`` is ``(n_ts, n_c1)``; the count matrix has one row per
    ``ts`` centre and one column per ``c1`` centre.
    """

    r: float
    ts_range: Tuple[float, float] = DEFAULT_TS_RANGE
    c1_range: Tuple[float, float] = DEFAULT_C1_RANGE
    resolution: Tuple[int, int] = (200, 200)
    method: str = PLAIN
    cap: int = 40
    tol: float = 1e-13

    def __post_init__(self):
        for name in ("ts_range", "c1_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValueError(f"{name} must satisfy lo < hi")
        if min(self.resolution) < 2:
            raise ValueError("resolution must be at least 2 in each direction")
        NewtonConfig(self.cap, self.tol, self.method)

    @property
    def newton_config(self) -> NewtonConfig:
        return NewtonConfig(self.cap, self.tol, self.method)

    def ts_centers(self) -> np.ndarray:
        return _centers(self.ts_range, self.resolution[0])

    def c1_centers(self) -> np.ndarray:
        return _centers(self.c1_range, self.resolution[1])


def _centers(rng, m):
    lo, hi = rng
    return lo + (np.arange(m) + 0.5) * ((hi - lo) / m)


@dataclass(frozen=True, eq=False)
class PortraitGrid:
    spec: PortraitSpec
    counts: np.ndarray

    @property
    def converged_cells(self) -> int:
        return int(np.count_nonzero(self.counts >= 0))


def portrait(p: ProblemInstance, spec: PortraitSpec, jobs: int = 1) -> PortraitGrid:
    """Newton iteration count from every cell centre of ``spec``.

    Cells that fail to reach ``spec.tol`` within ``spec.cap`` steps (or
    whose iterates blow up, or hit a singular Jacobian) hold -1.
    """
    fc = classify(p)
    if not fc.infeasible:
        raise RegimeError(f"portraits need an infeasible instance; a={p.a}, a_c={fc.a_c}")
    ts = spec.ts_centers()
    c1 = spec.c1_centers()
    cfg = spec.newton_config
    b = p.boundary

    def rows(chunk):
        TS, C1 = np.meshgrid(ts[chunk], c1, indexing="ij")
        return newton_iteration_counts(TS, C1, spec.r, b, cfg)

    chunks = np.array_split(np.arange(ts.size), max(1, min(jobs, ts.size)))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(rows, chunks))
    else:
        parts = [rows(c) for c in chunks]
    return PortraitGrid(spec, np.vstack(parts))


def write_portrait_csv(g: PortraitGrid, path) -> None:
    """Header row holds the ``c1`` centres, first column the ``ts`` centres."""
    ts = g.spec.ts_centers()
    c1 = g.spec.c1_centers()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ts\\c1"] + [f"{c:.17g}" for c in c1])
        for t, row in zip(ts, g.counts):
            w.writerow([f"{t:.17g}"] + [str(int(v)) for v in row])


def read_portrait_csv(path):
    """Return ``(ts_centers, c1_centers, counts)`` from a portrait CSV."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    c1 = np.array([float(x) for x in rows[0][1:]])
    ts = np.array([float(r[0]) for r in rows[1:]])
    counts = np.array([[int(x) for x in r[1:]] for r in rows[1:]], dtype=np.int64)
    return ts, c1, counts


# grey level used for a cell that needed the full iteration budget
_DARKEST = 32


def _grey(counts: np.ndarray, cap: int) -> np.ndarray:
    level = np.zeros(counts.shape, dtype=np.uint8)
    ok = counts >= 0
    scaled = 255.0 - counts[ok] * ((255.0 - _DARKEST) / cap)
    level[ok] = np.rint(scaled).astype(np.uint8)
    return level


def write_portrait_pgm(g: PortraitGrid, path) -> None:
    """Binary 8-bit PGM: 0 iterations is white, ``cap`` is dark grey, -1 black.

    ``ts`` runs left to right and ``c1`` bottom to top.
    """
    img = _grey(g.counts, g.spec.cap).T[::-1]
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img).tobytes())
