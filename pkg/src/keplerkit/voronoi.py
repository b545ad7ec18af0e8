"""Voronoi cells of packing vertices and functions defined on vertices.

Only interior vertices get cells: with every cell of a saturated packing
inside a ball of radius 2 about its centre, bisectors against centres
farther than 4 never cut the cell, so a vertex at depth >= 4 sees all the
neighbours that matter.
"""

from __future__ import annotations

import math
import os
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import constants, geom
from .packing import INTERIOR_MARGIN, Packing, PackingError

SQRT32 = math.sqrt(32.0)
NEIGHBOR_CUTOFF = 4.0
MARGIN_TOL = -1e-9


@dataclass(frozen=True)
class VoronoiCellRecord:
    index: int
    vertex: np.ndarray
    cell: geom.ConvexPolytope
    volume: float
    circumradius: float

    @property
    def face_count(self) -> int:
        return len(self.cell.faces)


def _require_interior(p: Packing, index: int) -> None:
    if not p.is_interior(index):
        raise PackingError(
            f"vertex {index} lies within {INTERIOR_MARGIN} of the window boundary"
        )


def voronoi_cell(p: Packing, index: int) -> VoronoiCellRecord:
    _require_interior(p, index)
    v = p.centers[index]
    near = [j for j in p.neighbors(v, NEIGHBOR_CUTOFF) if j != index]
    rel = p.centers[near] - v
    order = np.argsort(np.linalg.norm(rel, axis=1), kind="stable")
    # built around the origin, nearest neighbours first, then moved to v
    local = geom.halfspace_intersection(geom.HalfSpace.bisector(np.zeros(3), w) for w in rel[order])
    cell = local.translated(v)
    return VoronoiCellRecord(index, v, cell, cell.volume, geom.polytope_circumradius(cell, v))


_cells: "weakref.WeakKeyDictionary[Packing, list]" = weakref.WeakKeyDictionary()


def thread_count() -> int:
    """Worker threads for per-cell work: ``KEPLERKIT_THREADS`` or all cores."""
    raw = os.environ.get("KEPLERKIT_THREADS", "")
    n = int(raw) if raw.strip() else (os.cpu_count() or 1)
    if n < 1:
        raise ValueError("KEPLERKIT_THREADS must be a positive integer")
    return n


def interior_cells(p: Packing) -> list[VoronoiCellRecord]:
    """Cells of all interior vertices, memoised per packing object.

    Cells are independent, so they are computed on a thread pool; results
    keep the order of ``p.interior_indices`` whatever the thread count.
    """
    if p not in _cells:
        idx = [int(i) for i in p.interior_indices]
        workers = min(thread_count(), max(1, len(idx)))
        if workers == 1:
            cells = [voronoi_cell(p, i) for i in idx]
        else:
            with ThreadPoolExecutor(workers) as pool:
                cells = list(pool.map(lambda i: voronoi_cell(p, i), idx))
        _cells[p] = cells
    return _cells[p]


@dataclass(frozen=True)
class VertexFunction:
    """A real value ``a(v)`` for each interior vertex, keyed by centre index."""

    values: dict
    source: str = ""

    @classmethod
    def constant(cls, p: Packing, value: float, source: str | None = None) -> "VertexFunction":
        return cls({int(i): float(value) for i in p.interior_indices}, source or f"constant({value})")

    @classmethod
    def from_cells(cls, p: Packing, fn, source: str = "") -> "VertexFunction":
        """Build ``a`` by applying ``fn(record)`` to every interior cell."""
        return cls({rec.index: float(fn(rec)) for rec in interior_cells(p)}, source)

    def __getitem__(self, index: int) -> float:
        try:
            return self.values[int(index)]
        except KeyError:
            raise KeyError(f"vertex function undefined at vertex {index}") from None

    def check_domain(self, p: Packing) -> None:
        missing = set(map(int, p.interior_indices)) - set(self.values)
        if missing:
            raise KeyError(f"vertex function undefined at interior vertices {sorted(missing)[:5]}")


def deficit_function(p: Packing) -> VertexFunction:
    """``a(v) = max(0, sqrt32 - vol)``, the smallest nonnegative compatible choice."""
    return VertexFunction.from_cells(p, lambda r: max(0.0, SQRT32 - r.volume), "deficit")


def fcc_compatibility_check(p: Packing, a: VertexFunction) -> list[tuple[int, float]]:
    """Margins ``vol(cell) + a(v) - sqrt32`` at every interior vertex.

    ``a`` is fcc-compatible on the window iff all margins are >= -1e-9.
    """
    a.check_domain(p)
    return [(rec.index, rec.volume + a[rec.index] - SQRT32) for rec in interior_cells(p)]


def is_fcc_compatible(margins) -> bool:
    return all(m >= MARGIN_TOL for _, m in margins)


@dataclass(frozen=True)
class NegligibilityFit:
    radii: tuple
    sums: tuple
    fitted_C1: float
    growth_exponent: float | None

    @property
    def passes(self) -> bool:
        return all(s <= self.fitted_C1 * r * r for r, s in zip(self.radii, self.sums))

    @property
    def growing(self) -> bool:
        """True when the partial sums outgrow r**2 across the radii."""
        return self.growth_exponent is not None and self.growth_exponent > 2.5


def negligibility_fit(p: Packing, a: VertexFunction, x, radii) -> NegligibilityFit:
    """Partial sums of ``a`` over nested balls about ``x``, fitted to ``C1 r^2``.

    No finite window certifies negligibility; the fitted constant and the
    log-log growth exponent of the sums are the evidence reported.
    """
    x = geom.as_point(x)
    radii = tuple(float(r) for r in radii)
    safe = p.depth(x) - INTERIOR_MARGIN
    if any(r > safe + 1e-9 for r in radii):
        raise PackingError(f"radius exceeds the interior margin ({safe:.6g}) around x")
    sums = []
    for r in radii:
        idx = p.neighbors(x, r)
        sums.append(float(sum(a[i] for i in idx)))
    c1 = max([0.0] + [s / (r * r) for r, s in zip(radii, sums) if r > 0])
    exponent = None
    if len(radii) >= 2 and all(s > 0 for s in sums):
        exponent = float(np.polyfit(np.log(radii), np.log(sums), 1)[0])
    return NegligibilityFit(radii, tuple(sums), c1, exponent)


def lemma4_function(p: Packing, sigma_values: VertexFunction) -> VertexFunction:
    """Vertex function defined by the score-to-volume identity.

    ``a(v) = -sigma(v) / (4 delta_oct) + 4 pi / (3 delta_oct) - vol(cell(v))``
    """
    sigma_values.check_domain(p)
    return VertexFunction(
        {rec.index: constants.fcc_cell_volume_from_score(sigma_values[rec.index]) - rec.volume
         for rec in interior_cells(p)},
        f"score-identity({sigma_values.source})",
    )
