"""Geometry primitives: ball intersections, solid angles and convex polytopes.

Points are plain ``numpy`` arrays of shape ``(3,)``; lengths are measured in
units of the packing-ball radius.  Polytopes are built from half-spaces
``normal . p <= offset`` by brute-force vertex enumeration, which is cheap at
the sizes used here (a Voronoi cell has a few dozen candidate planes).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

MERGE_TOL = 1e-9
FEASIBILITY_TOL = 1e-9
DEGENERATE_TRIPLE_TOL = 1e-12
BOX_HALF_WIDTH = 100.0


class GeometryError(ValueError):
    """Base class for degenerate or invalid geometric input."""


class DegenerateSolidAngleError(GeometryError):
    pass


class UnboundedPolytopeError(GeometryError):
    pass


class EmptyPolytopeError(GeometryError):
    pass


def as_point(p) -> np.ndarray:
    """Coerce ``p`` to a finite float array of shape (3,)."""
    arr = np.asarray(p, dtype=float).reshape(3)
    if not np.all(np.isfinite(arr)):
        raise GeometryError(f"non-finite coordinates: {arr}")
    return arr


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius > 0:
            raise GeometryError("ball radius must be positive")

    @property
    def volume(self) -> float:
        return 4.0 * math.pi * self.radius**3 / 3.0


@dataclass(frozen=True)
class HalfSpace:
    """The closed half-space ``{p : normal . p <= offset}`` with unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = as_point(self.normal)
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise GeometryError("half-space normal must have unit length")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_vector(cls, direction, offset: float) -> "HalfSpace":
        """Normalise ``direction`` and rescale ``offset`` to match."""
        d = as_point(direction)
        norm = np.linalg.norm(d)
        if norm == 0:
            raise GeometryError("zero normal")
        return cls(d / norm, offset / norm)

    @classmethod
    def bisector(cls, v, w) -> "HalfSpace":
        """Points at least as close to ``v`` as to ``w``."""
        v, w = as_point(v), as_point(w)
        return cls.from_vector(w - v, (w @ w - v @ v) / 2.0)

    def contains(self, p, tol: float = FEASIBILITY_TOL) -> bool:
        return float(self.normal @ as_point(p)) <= self.offset + tol


@dataclass(frozen=True)
class ConvexPolytope:
    halfspaces: tuple
    vertices: np.ndarray
    faces: tuple = field(repr=False)
    volume: float

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def contains(self, p, tol: float = FEASIBILITY_TOL) -> bool:
        return all(h.contains(p, tol) for h in self.halfspaces)

    def translated(self, shift) -> "ConvexPolytope":
        shift = as_point(shift)
        hs = tuple(HalfSpace(h.normal, h.offset + float(h.normal @ shift)) for h in self.halfspaces)
        return ConvexPolytope(hs, self.vertices + shift, self.faces, self.volume)


def lens_volume(d: float, r1: float, r2: float) -> float:
    """Volume of ``B(p, r1) & B(q, r2)`` for centres at distance ``d``.

    Sum of the two spherical caps cut off by the radical plane.
    """
    if d < 0 or r1 <= 0 or r2 <= 0:
        raise ValueError("need d >= 0 and positive radii")
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        r = min(r1, r2)
        return 4.0 * math.pi * r**3 / 3.0
    # distance from the first centre to the radical plane
    a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    h1 = r1 - a
    h2 = r2 - (d - a)
    return _cap(h1, r1) + _cap(h2, r2)


def lens_volumes(d, r1: float, r2: float) -> np.ndarray:
    """Vectorised :func:`lens_volume` over an array of distances."""
    d = np.asarray(d, dtype=float)
    out = np.zeros_like(d)
    inner = d <= abs(r1 - r2)
    out[inner] = 4.0 * math.pi * min(r1, r2) ** 3 / 3.0
    mid = ~inner & (d < r1 + r2)
    dm = d[mid]
    a = (dm * dm + r1 * r1 - r2 * r2) / (2.0 * dm)
    h1, h2 = r1 - a, r2 - (dm - a)
    out[mid] = math.pi / 3.0 * (h1 * h1 * (3.0 * r1 - h1) + h2 * h2 * (3.0 * r2 - h2))
    return out


def _cap(h: float, r: float) -> float:
    return math.pi * h * h * (3.0 * r - h) / 3.0


def solid_angle(apex, a, b, c) -> float:
    """Solid angle subtended at ``apex`` by the triangle ``abc``.

    Uses the Van Oosterom-Strackee arctangent formula.  Raises
    :class:`DegenerateSolidAngleError` when the four points are coplanar.
    """
    o = as_point(apex)
    r1, r2, r3 = as_point(a) - o, as_point(b) - o, as_point(c) - o
    triple = float(r1 @ np.cross(r2, r3))
    if abs(triple) < DEGENERATE_TRIPLE_TOL:
        raise DegenerateSolidAngleError("apex coplanar with triangle")
    l1, l2, l3 = np.linalg.norm(r1), np.linalg.norm(r2), np.linalg.norm(r3)
    denom = l1 * l2 * l3 + (r1 @ r2) * l3 + (r1 @ r3) * l2 + (r2 @ r3) * l1
    omega = 2.0 * math.atan2(abs(triple), denom)
    return omega % (4.0 * math.pi)


def _box_halfspaces(half_width: float) -> list[HalfSpace]:
    out = []
    for axis in range(3):
        for sign in (1.0, -1.0):
            n = np.zeros(3)
            n[axis] = sign
            out.append(HalfSpace(n, half_width))
    return out


def _enumerate_vertices(normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    m = len(normals)
    triples = np.array(list(itertools.combinations(range(m), 3)), dtype=np.intp)
    found = []
    for chunk in np.array_split(triples, max(1, len(triples) // 20000)):
        mats = normals[chunk]
        dets = np.linalg.det(mats)
        ok = np.abs(dets) > 1e-12
        if not ok.any():
            continue
        pts = np.linalg.solve(mats[ok], offsets[chunk[ok]][..., None])[..., 0]
        slack = pts @ normals.T - offsets
        found.append(pts[np.all(slack <= FEASIBILITY_TOL, axis=1)])
    if not found:
        return np.empty((0, 3))
    return np.concatenate(found)


def _dedup(points: np.ndarray, tol: float = MERGE_TOL) -> np.ndarray:
    if len(points) == 0:
        return points
    tree = cKDTree(points)
    keep = np.ones(len(points), dtype=bool)
    for i, j in sorted(tree.query_pairs(tol)):
        if keep[i] and keep[j]:
            keep[j] = False
    # lexicographic order makes the vertex list independent of plane order
    uniq = points[keep]
    return uniq[np.lexsort(uniq.T[::-1])]


def _order_face(vertices: np.ndarray, idx: np.ndarray, normal: np.ndarray) -> tuple:
    pts = vertices[idx]
    c = pts.mean(axis=0)
    e1 = pts[0] - c
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    rel = pts - c
    ang = np.arctan2(rel @ e2, rel @ e1)
    return tuple(int(i) for i in idx[np.argsort(ang)])


def halfspace_intersection(halfspaces, initial: int = 16) -> ConvexPolytope:
    """Intersect half-spaces into a bounded convex polytope.

    Vertices are enumerated over a working set of planes that grows by the
    planes the current vertices violate, starting from the bounding box and
    the first ``initial`` inputs; pass nearest constraints first for speed.

    Raises :class:`UnboundedPolytopeError` if the region reaches the
    bounding box of half-width ``BOX_HALF_WIDTH`` and
    :class:`EmptyPolytopeError` if it has no interior.
    """
    halfspaces = tuple(halfspaces)
    box = _box_halfspaces(BOX_HALF_WIDTH)
    normals = np.array([h.normal for h in halfspaces]).reshape(-1, 3)
    offsets = np.array([h.offset for h in halfspaces])

    active = np.zeros(len(halfspaces), dtype=bool)
    active[:initial] = True
    box_n = np.array([h.normal for h in box])
    box_b = np.array([h.offset for h in box])
    while True:
        verts = _dedup(_enumerate_vertices(
            np.vstack([normals[active], box_n]), np.concatenate([offsets[active], box_b])
        ))
        if len(verts) == 0:
            break
        violated = np.any(verts @ normals.T - offsets > FEASIBILITY_TOL, axis=0) & ~active
        if not violated.any():
            break
        active |= violated

    if len(verts) < 4:
        raise EmptyPolytopeError("half-space intersection has no interior")
    if np.any(np.abs(verts) >= BOX_HALF_WIDTH - 1e-6):
        raise UnboundedPolytopeError("half-space intersection is unbounded")

    faces = []
    seen = set()
    for n, b in zip(normals, offsets):
        on = np.flatnonzero(np.abs(verts @ n - b) <= FEASIBILITY_TOL)
        if len(on) < 3 or frozenset(on) in seen:
            continue
        seen.add(frozenset(on))
        faces.append(_order_face(verts, on, n))

    volume = _fan_volume(verts, faces)
    if volume <= 1e-12:
        raise EmptyPolytopeError("half-space intersection has zero volume")
    return ConvexPolytope(halfspaces, verts, tuple(faces), volume)


def _fan_volume(verts: np.ndarray, faces) -> float:
    centre = verts.mean(axis=0)
    total = 0.0
    for face in faces:
        pts = verts[list(face)]
        fc = pts.mean(axis=0)
        nxt = np.roll(pts, -1, axis=0)
        dets = np.einsum("ij,ij->i", pts - centre, np.cross(nxt - centre, fc - centre))
        total += np.abs(dets).sum() / 6.0
    return float(total)


def polytope_circumradius(p: ConvexPolytope, center) -> float:
    c = as_point(center)
    return float(np.max(np.linalg.norm(p.vertices - c, axis=1)))
