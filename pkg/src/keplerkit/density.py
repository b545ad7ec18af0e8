"""Finite densities of windowed packings and the density-bound chain.

``A(x, r)`` is the volume of ``B(x, r)`` covered by packing balls.  Because
the balls are pairwise disjoint it is a plain sum of ball-ball lens volumes,
so no union computation is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geom
from .constants import fcc_density
from .packing import Packing, PackingError
from .voronoi import SQRT32, VertexFunction, interior_cells

BALL_VOLUME = 4.0 * math.pi / 3.0


def ball_volume(r: float) -> float:
    return BALL_VOLUME * r**3


def _check_window(p: Packing, x: np.ndarray, r: float) -> None:
    if r <= 0:
        raise ValueError("radius must be positive")
    if p.depth(x) < r + 1.0 - 1e-9:
        raise PackingError(
            f"B(x, {r} + 1) leaves the packing window (depth of x is {p.depth(x):.6g})"
        )


def covered_volume(p: Packing, x, r: float) -> float:
    x = geom.as_point(x)
    _check_window(p, x, r)
    idx = p.neighbors(x, r + 1.0)
    if not len(idx):
        return 0.0
    d = np.linalg.norm(p.centers[idx] - x, axis=1)
    return float(geom.lens_volumes(d, 1.0, r).sum())


@dataclass(frozen=True)
class DensityReport:
    x: tuple
    r: float
    A: float
    delta: float
    ball_count: int

    @property
    def count_bound_holds(self) -> bool:
        """A(x, r) <= |Lambda(x, r + 1)| * 4 pi / 3."""
        return self.A <= self.ball_count * BALL_VOLUME


def finite_density(p: Packing, x, r: float) -> DensityReport:
    x = geom.as_point(x)
    A = covered_volume(p, x, r)
    count = len(p.neighbors(x, r + 1.0))
    return DensityReport(tuple(x), float(r), A, A / ball_volume(r), count)


def lemma_bound(r: float, C1: float) -> float:
    """Explicit finite-r bound on the density from the proof of the C/r law."""
    return fcc_density() * (1.0 + 3.0 / r) ** 3 + C1 * (r + 1.0) ** 2 / (r**3 * SQRT32)


@dataclass(frozen=True)
class LemmaBoundCheck:
    r: float
    C1: float
    A: float
    delta: float
    bound: float
    ball_count: int
    scaled_excess: float  # r * (delta - pi/sqrt18)
    fitted_C: float  # max of scaled_excess over the whole scan

    @property
    def satisfied(self) -> bool:
        return self.delta <= self.bound + 1e-12

    @property
    def count_bound_holds(self) -> bool:
        return self.A <= self.ball_count * BALL_VOLUME


def lemma_bound_check(p: Packing, x, radii, C1: float = 0.0) -> list[LemmaBoundCheck]:
    x = geom.as_point(x)
    radii = [float(r) for r in radii]
    for r in radii:
        _check_window(p, x, r)
    reports = [finite_density(p, x, r) for r in radii]
    excess = [r * (rep.delta - fcc_density()) for r, rep in zip(radii, reports)]
    fitted = max(excess)
    return [
        LemmaBoundCheck(r, C1, rep.A, rep.delta, lemma_bound(r, C1), rep.ball_count, e, fitted)
        for r, rep, e in zip(radii, reports, excess)
    ]


@dataclass(frozen=True)
class Inequality2Audit:
    r: float
    C1: float
    count: int
    left: float  # sqrt32 * |Lambda(x, r+1)|
    middle: float  # sum of a(v) + vol(cell) over Lambda(x, r+1)
    cell_volume: float  # sum of vol(cell) alone
    right: float  # C1 (r+1)^2 + vol B(x, r+3)
    final: float  # C1 (r+1)^2 + (1 + 3/r)^3 vol B(x, r)

    @property
    def left_le_middle(self) -> bool:
        return self.left <= self.middle + 1e-9 * max(1, self.count)

    @property
    def middle_le_right(self) -> bool:
        return self.middle <= self.right

    @property
    def right_le_final(self) -> bool:
        return self.right <= self.final * (1 + 1e-12)

    @property
    def holds(self) -> bool:
        return self.left_le_middle and self.middle_le_right and self.right_le_final


def inequality2_audit(p: Packing, a: VertexFunction, x, r: float, C1: float | None = None) -> Inequality2Audit:
    """Check each step of the cell-volume chain over ``Lambda(x, r + 1)``.

    When ``C1`` is omitted the smallest value consistent with this window,
    ``max(0, sum a / (r + 1)^2)``, is used.
    """
    x = geom.as_point(x)
    idx = p.neighbors(x, r + 1.0)
    interior = set(map(int, p.interior_indices))
    if not set(map(int, idx)) <= interior:
        raise PackingError("Lambda(x, r+1) contains vertices near the window boundary")
    cells = {rec.index: rec.volume for rec in interior_cells(p)}
    vols = float(sum(cells[int(i)] for i in idx))
    asum = float(sum(a[i] for i in idx))
    if C1 is None:
        C1 = max(0.0, asum / (r + 1.0) ** 2)
    return Inequality2Audit(
        float(r), float(C1), len(idx),
        SQRT32 * len(idx), asum + vols, vols,
        C1 * (r + 1.0) ** 2 + ball_volume(r + 3.0),
        C1 * (r + 1.0) ** 2 + (1.0 + 3.0 / r) ** 3 * ball_volume(r),
    )
