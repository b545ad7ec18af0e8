"""Named constants of the density argument, each with an independent check.

Every value is computed from its closed form.  The verification value comes
from a different route (solid-angle sums, a hull volume), so agreement
between the two is meaningful rather than circular.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import ConvexHull

from . import geom

T0 = 1.255
TRUNCATION = 2 * T0


@dataclass(frozen=True)
class NamedConstant:
    name: str
    value: float
    formula: str
    oracle: float | None = None
    tolerance: float | None = None

    @property
    def verified(self) -> bool | None:
        if self.oracle is None:
            return None
        return abs(self.value - self.oracle) <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "formula": self.formula,
            "value": self.value,
            "oracle": self.oracle,
            "tolerance": self.tolerance,
            "pass": self.verified,
        }


def regular_tetrahedron(edge: float = 2.0) -> np.ndarray:
    s = edge / math.sqrt(8.0)
    return s * np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)


def regular_octahedron(edge: float = 2.0) -> np.ndarray:
    s = edge / math.sqrt(2.0)
    return s * np.vstack([np.eye(3), -np.eye(3)])


def tetrahedron_vertex_angle() -> float:
    """Solid angle at one vertex of a regular tetrahedron."""
    t = regular_tetrahedron()
    return geom.solid_angle(t[0], t[1], t[2], t[3])


def octahedron_vertex_angle() -> float:
    """Solid angle at a vertex of the regular octahedron.

    The vertex cone over the square link is split into two triangles.
    """
    o = regular_octahedron()
    apex = o[0]
    ring = [o[1], o[5], o[4], o[2]]  # +y, -z, -y, +z in cyclic order
    return geom.solid_angle(apex, ring[0], ring[1], ring[2]) + geom.solid_angle(
        apex, ring[0], ring[2], ring[3]
    )


def _sector_density(vertex_angles, volume: float) -> float:
    # unit-radius ball sector at a vertex has volume angle / 3
    return sum(a / 3.0 for a in vertex_angles) / volume


def delta_tet() -> float:
    return math.sqrt(8.0) * math.atan(math.sqrt(2.0) / 5.0)


def delta_tet_from_solid_angles() -> float:
    tet_volume = 2.0 * math.sqrt(2.0) / 3.0
    return _sector_density([tetrahedron_vertex_angle()] * 4, tet_volume)


@lru_cache(maxsize=None)
def delta_oct() -> float:
    oct_volume = 8.0 * math.sqrt(2.0) / 3.0
    return _sector_density([octahedron_vertex_angle()] * 6, oct_volume)


def delta_oct_closed_form() -> float:
    # vertex angle of the octahedron is 4 arcsin(1/3)
    return 6 * 4 * math.asin(1.0 / 3.0) / 3.0 / (8.0 * math.sqrt(2.0) / 3.0)


def pt() -> float:
    return -math.pi / 3.0 + math.sqrt(2.0) * delta_tet()


def fcc_density() -> float:
    return math.pi / math.sqrt(18.0)


def dodecahedron_vertices(inradius: float = 1.0) -> np.ndarray:
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    pts = [list(s) for s in itertools.product((-1.0, 1.0), repeat=3)]
    for a, b in itertools.product((-1.0, 1.0), repeat=2):
        pts += [[0, a / phi, b * phi], [a / phi, b * phi, 0], [a * phi, 0, b / phi]]
    pts = np.array(pts, dtype=float)
    hull = ConvexHull(pts)
    r = float(np.min(-hull.equations[:, 3]))
    return pts * (inradius / r)


def dodecahedral_bound() -> float:
    """Ball volume over the volume of the circumscribed regular dodecahedron."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    inradius_per_edge = phi * phi / (2.0 * math.sqrt(3.0 - phi))
    edge = 1.0 / inradius_per_edge
    volume = (15.0 + 7.0 * math.sqrt(5.0)) / 4.0 * edge**3
    return (4.0 * math.pi / 3.0) / volume


def dodecahedral_bound_from_hull() -> float:
    return (4.0 * math.pi / 3.0) / ConvexHull(dodecahedron_vertices()).volume


def fcc_cell_volume_from_score(score: float) -> float:
    """Left side of the cell-volume inequality for a given star score."""
    d = delta_oct()
    return -score / (4.0 * d) + 4.0 * math.pi / (3.0 * d)


def all_constants() -> list[NamedConstant]:
    p = pt()
    return [
        NamedConstant(
            "delta_tet", delta_tet(), "sqrt(8) * arctan(sqrt(2)/5)",
            delta_tet_from_solid_angles(), 1e-9,
        ),
        NamedConstant(
            "delta_oct", delta_oct(), "6 * (vertex solid angle / 3) / (8 sqrt(2) / 3)",
            delta_oct_closed_form(), 1e-9,
        ),
        NamedConstant("pt", p, "-pi/3 + sqrt(2) * delta_tet", 0.05537, 1e-5),
        NamedConstant("8pt", 8 * p, "8 * pt", 0.442989, 1e-6),
        NamedConstant("t0", T0, "1.255"),
        NamedConstant("2t0", TRUNCATION, "2 * t0"),
        NamedConstant("fcc_density", fcc_density(), "pi / sqrt(18)", 0.74048, 1e-5),
        NamedConstant(
            "dodecahedral_bound", dodecahedral_bound(),
            "(4 pi / 3) / vol(regular dodecahedron, inradius 1)",
            dodecahedral_bound_from_hull(), 1e-9,
        ),
        NamedConstant(
            "fcc_cell_volume", fcc_cell_volume_from_score(8 * p),
            "-8pt / (4 delta_oct) + 4 pi / (3 delta_oct)", math.sqrt(32.0), 1e-9,
        ),
    ]
