"""Finite packings of unit balls inside a spherical window.

A :class:`Packing` stores ball centres (pairwise at least 2 apart) together
with the ball-shaped region they were generated in.  Vertices at distance at
least ``INTERIOR_MARGIN`` from the window boundary are *interior*: everything
that depends on a vertex's neighbourhood up to distance 4 (Voronoi cells,
local stars) is only trusted for those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import Delaunay, cKDTree
from scipy.spatial.distance import pdist

from . import jsonio
from .geom import as_point

MIN_DISTANCE = 2.0
DISTANCE_TOL = 1e-12
INTERIOR_MARGIN = 4.0
EXHAUSTIVE_CHECK_LIMIT = 5000


class PackingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Packing:
    centers: np.ndarray
    window_center: np.ndarray
    window_radius: float
    label: str = ""
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=float).reshape(-1, 3)
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "window_center", as_point(self.window_center))
        object.__setattr__(self, "window_radius", float(self.window_radius))
        if self.validate:
            check_packing(self)

    def __len__(self) -> int:
        return len(self.centers)

    @cached_property
    def tree(self) -> cKDTree:
        return cKDTree(self.centers if len(self.centers) else np.empty((0, 3)))

    def depth(self, point) -> float:
        """Distance from ``point`` to the window boundary (negative outside)."""
        return self.window_radius - float(np.linalg.norm(as_point(point) - self.window_center))

    def is_interior(self, index: int) -> bool:
        return self.depth(self.centers[index]) >= INTERIOR_MARGIN - 1e-9

    @cached_property
    def interior_indices(self) -> np.ndarray:
        d = self.window_radius - np.linalg.norm(self.centers - self.window_center, axis=1)
        return np.flatnonzero(d >= INTERIOR_MARGIN - 1e-9)

    def neighbors(self, point, radius: float) -> np.ndarray:
        """Sorted indices of centres within ``radius`` of ``point``."""
        if not len(self.centers):
            return np.empty(0, dtype=np.intp)
        return np.array(sorted(self.tree.query_ball_point(as_point(point), radius + 1e-12)), dtype=np.intp)

    def index_of(self, point, tol: float = 1e-9) -> int:
        d, i = self.tree.query(as_point(point))
        if d > tol:
            raise PackingError(f"no centre at {point}")
        return int(i)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "window": {"center": self.window_center.tolist(), "radius": self.window_radius},
            "centers": self.centers.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Packing":
        try:
            w = data["window"]
            return cls(
                np.asarray(data["centers"], dtype=float).reshape(-1, 3),
                w["center"], w["radius"], data.get("label", ""),
            )
        except KeyError as exc:
            raise PackingError(f"packing file missing field {exc}") from None


def check_packing(p: Packing) -> None:
    """Raise :class:`PackingError` unless ``p`` is a valid windowed packing."""
    c = p.centers
    if not np.all(np.isfinite(c)):
        raise PackingError("non-finite centre coordinates")
    if not p.window_radius > 0:
        raise PackingError("window radius must be positive")
    outside = np.linalg.norm(c - p.window_center, axis=1) > p.window_radius + 1e-9
    if outside.any():
        raise PackingError(f"{int(outside.sum())} centres lie outside the window")
    if len(c) < 2:
        return
    limit = MIN_DISTANCE - DISTANCE_TOL
    if len(c) < EXHAUSTIVE_CHECK_LIMIT:
        dmin = pdist(c).min()
        if dmin < limit:
            raise PackingError(f"centres closer than 2 (min distance {dmin!r})")
    else:
        pairs = cKDTree(c).query_pairs(limit)
        if pairs:
            raise PackingError(f"{len(pairs)} pairs of centres closer than 2")


def save_packing(p: Packing, path) -> None:
    jsonio.write_json(path, p.to_dict())


def load_packing(path) -> Packing:
    return Packing.from_dict(jsonio.read_json(path))


# --- lattice constructions -------------------------------------------------

def _in_window(points: np.ndarray, center, radius: float) -> np.ndarray:
    keep = np.linalg.norm(points - center, axis=1) <= radius + 1e-9
    pts = points[keep]
    return pts[np.lexsort(pts.T[::-1])]


def fcc_packing(window_radius: float, center=(0.0, 0.0, 0.0)) -> Packing:
    """Face-centred cubic packing with a ball at ``center``.

    Integer points with even coordinate sum, scaled by sqrt(2) so that
    nearest neighbours sit at distance exactly 2.
    """
    s = math.sqrt(2.0)
    n = int(math.ceil(window_radius / s)) + 1
    r = np.arange(-n, n + 1)
    ijk = np.stack(np.meshgrid(r, r, r, indexing="ij"), -1).reshape(-1, 3)
    ijk = ijk[ijk.sum(axis=1) % 2 == 0]
    center = as_point(center)
    pts = _in_window(s * ijk + center, center, window_radius)
    return Packing(pts, center, window_radius, "fcc", validate=False)


def hcp_packing(window_radius: float, center=(0.0, 0.0, 0.0)) -> Packing:
    """Hexagonal close packing, ABAB stacking along z, ball at ``center``."""
    h = 2.0 * math.sqrt(2.0 / 3.0)
    nz = int(math.ceil(window_radius / h)) + 1
    nxy = int(math.ceil(window_radius / math.sqrt(3.0))) + 2
    a, b = np.meshgrid(np.arange(-2 * nxy, 2 * nxy + 1), np.arange(-nxy, nxy + 1), indexing="ij")
    layer = np.stack([2.0 * a + b, math.sqrt(3.0) * b], -1).reshape(-1, 2)
    shift = np.array([1.0, 1.0 / math.sqrt(3.0)])
    pts = []
    for k in range(-nz, nz + 1):
        xy = layer + (shift if k % 2 else 0.0)
        pts.append(np.column_stack([xy, np.full(len(xy), k * h)]))
    center = as_point(center)
    pts = _in_window(np.concatenate(pts) + center, center, window_radius)
    return Packing(pts, center, window_radius, "hcp", validate=False)


def cubic_packing(window_radius: float, spacing: float = 2.0, center=(0.0, 0.0, 0.0)) -> Packing:
    """Simple cubic lattice; with spacing 2 it is saturated (deep hole sqrt(3))."""
    n = int(math.ceil(window_radius / spacing)) + 1
    r = spacing * np.arange(-n, n + 1, dtype=float)
    pts = np.stack(np.meshgrid(r, r, r, indexing="ij"), -1).reshape(-1, 3)
    center = as_point(center)
    return Packing(_in_window(pts + center, center, window_radius), center, window_radius, "cubic")


def empty_packing(window_radius: float, center=(0.0, 0.0, 0.0)) -> Packing:
    return Packing(np.empty((0, 3)), center, window_radius, "empty")


# --- saturation ------------------------------------------------------------

@dataclass(frozen=True)
class SaturationReport:
    probe_count: int
    max_gap_distance: float
    probe_spacing: float
    worst_probe: tuple | None = None

    @property
    def saturated(self) -> bool:
        return self.max_gap_distance < MIN_DISTANCE


def _grid(center: np.ndarray, radius: float, spacing: float) -> np.ndarray:
    if radius < 0:
        return np.empty((0, 3))
    n = int(math.floor(radius / spacing))
    r = spacing * np.arange(-n, n + 1, dtype=float)
    g = np.stack(np.meshgrid(r, r, r, indexing="ij"), -1).reshape(-1, 3)
    g = g[np.linalg.norm(g, axis=1) <= radius]
    return g + center


def check_saturation(p: Packing, probe_spacing: float) -> SaturationReport:
    """Largest distance from a probe point to its nearest centre.

    Probes form a cubic grid over the window ball shrunk by 2, which keeps
    the report free of the gaps every finite window has at its rim.
    """
    if not 0 < probe_spacing <= 0.5:
        raise ValueError("probe_spacing must lie in (0, 0.5]")
    probes = _grid(p.window_center, p.window_radius - MIN_DISTANCE, probe_spacing)
    if not len(probes):
        return SaturationReport(0, 0.0, probe_spacing)
    if not len(p):
        return SaturationReport(len(probes), math.inf, probe_spacing, tuple(probes[0]))
    d, _ = p.tree.query(probes)
    i = int(np.argmax(d))
    return SaturationReport(len(probes), float(d[i]), probe_spacing, tuple(probes[i]))


class _SpatialHash:
    def __init__(self, points: np.ndarray, cell: float = MIN_DISTANCE):
        self.cell = cell
        self.buckets: dict[tuple, list] = {}
        for q in points:
            self.add(q)

    def _key(self, q):
        return tuple(int(math.floor(x / self.cell)) for x in q)

    def add(self, q) -> None:
        self.buckets.setdefault(self._key(q), []).append(q)

    def clear_of(self, q, dist: float) -> bool:
        kx, ky, kz = self._key(q)
        d2 = dist * dist
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    for w in self.buckets.get((kx + dx, ky + dy, kz + dz), ()):
                        if (q[0] - w[0]) ** 2 + (q[1] - w[1]) ** 2 + (q[2] - w[2]) ** 2 < d2:
                            return False
        return True


def _greedy_insert(existing: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Accept candidates in order if they keep distance >= 2 from all centres."""
    if len(existing) and len(candidates):
        d, _ = cKDTree(existing).query(candidates, distance_upper_bound=MIN_DISTANCE)
        candidates = candidates[d >= MIN_DISTANCE]
    added = []
    grid = _SpatialHash(np.empty((0, 3)))
    for q in candidates:
        if grid.clear_of(q, MIN_DISTANCE):
            grid.add(q)
            added.append(q)
    return np.array(added).reshape(-1, 3)


def _deep_holes(centers: np.ndarray, window_center, window_radius) -> np.ndarray:
    """Circumcentres of Delaunay cells that are at least 2 from every centre."""
    if len(centers) < 5:
        return np.empty((0, 3))
    tri = Delaunay(centers)
    simp = centers[tri.simplices]
    a = simp[:, 1:] - simp[:, :1]
    rhs = 0.5 * np.einsum("ijk,ijk->ij", a, a)
    det = np.linalg.det(a)
    ok = np.abs(det) > 1e-9
    cc = np.linalg.solve(a[ok], rhs[ok][..., None])[..., 0] + simp[ok, 0]
    cc = cc[np.linalg.norm(cc - window_center, axis=1) <= window_radius]
    if not len(cc):
        return cc
    d, _ = cKDTree(centers).query(cc)
    holes = cc[d >= MIN_DISTANCE]
    return holes[np.lexsort(holes.T[::-1])] if len(holes) else holes


def saturate(p: Packing, seed: int, candidate_spacing: float = 0.25) -> Packing:
    """Greedily add balls until no room is left inside the window.

    Three deterministic passes: a seeded jittered grid, the plain probe grid
    used by :func:`check_saturation`, then Delaunay circumcentres of any
    remaining empty sphere of radius >= 2 until none is left.
    """
    if not 0 < candidate_spacing <= 0.5:
        raise ValueError("candidate_spacing must lie in (0, 0.5]")
    rng = np.random.default_rng(seed)
    R, wc = p.window_radius, p.window_center
    centers = p.centers.copy()

    grid = _grid(wc, R, candidate_spacing)
    jittered = grid + rng.uniform(-0.5, 0.5, grid.shape) * candidate_spacing
    jittered = jittered[np.linalg.norm(jittered - wc, axis=1) <= R]
    for cand in (jittered, grid):
        centers = np.concatenate([centers, _greedy_insert(centers, cand)])

    while True:
        holes = _deep_holes(centers, wc, R)
        new = _greedy_insert(centers, holes)
        if not len(new):
            break
        centers = np.concatenate([centers, new])

    label = f"{p.label}+saturated(seed={seed})" if p.label else f"saturated(seed={seed})"
    return Packing(centers, wc, R, label)


def random_saturated_packing(window_radius: float, seed: int, candidate_spacing: float = 0.25) -> Packing:
    out = saturate(empty_packing(window_radius), seed, candidate_spacing)
    return Packing(out.centers, out.window_center, out.window_radius, f"random(seed={seed})", validate=False)
