"""Local stars of packing vertices and the plane graphs attached to them.

The graph of a star has the near neighbours ``U`` (distance <= 2 t0) as
vertices and joins two of them when they are within 2 t0 of each other.
The embedding is the radial projection onto the unit sphere about the
centre; the cyclic order of neighbours there is the rotation system from
which faces are traced and canonical codes are computed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import ConvexHull

from . import geom
from .constants import TRUNCATION
from .packing import Packing, PackingError

STAR_RADIUS = 4.0
EDGE_TOL = 1e-12
COPLANAR_TOL = 1e-7


class NotPlaneGraphError(ValueError):
    """Edges of the spherical embedding cross, or it is not cellular."""


# --- local stars -----------------------------------------------------------

@dataclass(frozen=True)
class LocalStar:
    center: np.ndarray
    near_vertices: np.ndarray
    u_set: np.ndarray
    label: str = ""

    @classmethod
    def from_points(cls, center, points, label: str = "") -> "LocalStar":
        c = geom.as_point(center)
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        d = np.linalg.norm(pts - c, axis=1)
        near = pts[(d <= STAR_RADIUS + EDGE_TOL) & (d > 0)]
        dn = np.linalg.norm(near - c, axis=1)
        return cls(c, near, near[dn <= TRUNCATION + EDGE_TOL], label)


def local_star(p: Packing, index: int) -> LocalStar:
    if not p.is_interior(index):
        raise PackingError(f"vertex {index} is too close to the window boundary for a star")
    v = p.centers[index]
    near = [j for j in p.neighbors(v, STAR_RADIUS) if j != index]
    return LocalStar.from_points(v, p.centers[near], f"{p.label}[{index}]")


def pent_star() -> LocalStar:
    """Twelve tangent balls: two poles and two aligned pentagonal rings.

    The ring height is fixed by tangency with the nearer pole; the rings then
    sit exactly 2 apart vertically and neighbours within a ring are slightly
    farther than 2 apart.
    """
    pole = np.array([0.0, 0.0, 2.0])

    def ring_point(z, k=0):
        rho = math.sqrt(4.0 - z * z)
        t = 2.0 * math.pi * k / 5.0
        return np.array([rho * math.cos(t), rho * math.sin(t), z])

    z = brentq(lambda z: np.linalg.norm(ring_point(z) - pole) - 2.0, 0.0, 1.9, xtol=1e-15)
    pts = [pole, -pole]
    for k in range(5):
        pts.append(ring_point(z, k))
        pts.append(ring_point(-z, k))
    pts = np.array(pts)
    gaps = np.linalg.norm(pts[:, None] - pts[None], axis=-1)[np.triu_indices(12, 1)]
    if gaps.min() < 2.0 - 1e-9 or np.abs(np.linalg.norm(pts, axis=1) - 2.0).max() > 1e-12:
        raise AssertionError("pentagonal configuration failed its distance audit")
    return LocalStar(np.zeros(3), pts, pts, "pent")


# --- plane graphs ----------------------------------------------------------

@dataclass(frozen=True)
class PlaneGraph:
    """A plane graph given by its rotation system.

    ``rotation[v]`` lists the neighbours of ``v`` in counter-clockwise order
    seen from outside the sphere.
    """

    rotation: tuple
    embedding_source: str = ""
    positions: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        rot = tuple(tuple(int(w) for w in nbrs) for nbrs in self.rotation)
        object.__setattr__(self, "rotation", rot)
        for v, nbrs in enumerate(rot):
            if len(set(nbrs)) != len(nbrs) or v in nbrs:
                raise ValueError(f"vertex {v}: repeated neighbour or loop")
            for w in nbrs:
                if v not in rot[w]:
                    raise ValueError(f"rotation not symmetric at edge {v}-{w}")

    @property
    def n(self) -> int:
        return len(self.rotation)

    @cached_property
    def edges(self) -> tuple:
        return tuple(sorted((v, w) for v, nbrs in enumerate(self.rotation) for w in nbrs if v < w))

    @property
    def adjacency(self) -> frozenset:
        return frozenset(frozenset(e) for e in self.edges)

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    def next_dart(self, u: int, v: int) -> tuple:
        """Dart following ``u -> v`` around the face on its left."""
        nbrs = self.rotation[v]
        return v, nbrs[(nbrs.index(u) - 1) % len(nbrs)]

    @cached_property
    def faces(self) -> tuple:
        seen = set()
        faces = []
        for u, nbrs in enumerate(self.rotation):
            for v in nbrs:
                if (u, v) in seen:
                    continue
                face = []
                dart = (u, v)
                while dart not in seen:
                    seen.add(dart)
                    face.append(dart[0])
                    dart = self.next_dart(*dart)
                faces.append(tuple(face))
        return tuple(faces)

    @property
    def face_sizes(self) -> tuple:
        return tuple(sorted(len(f) for f in self.faces))

    def face_size_counts(self) -> dict:
        out: dict = {}
        for k in self.face_sizes:
            out[k] = out.get(k, 0) + 1
        return out

    @property
    def euler_characteristic(self) -> int:
        return self.n - len(self.edges) + len(self.faces)

    @cached_property
    def components(self) -> tuple:
        comp = [-1] * self.n
        out = []
        for root in range(self.n):
            if comp[root] >= 0:
                continue
            comp[root] = len(out)
            members, stack = [root], [root]
            while stack:
                for w in self.rotation[stack.pop()]:
                    if comp[w] < 0:
                        comp[w] = len(out)
                        members.append(w)
                        stack.append(w)
            out.append(tuple(sorted(members)))
        return tuple(out)

    def is_connected(self) -> bool:
        return len(self.components) <= 1

    def faces_are_simple(self) -> bool:
        return all(len(set(f)) == len(f) for f in self.faces)

    def validate(self) -> None:
        """Raise unless every component is a map on the sphere.

        A connected graph must satisfy V - E + F = 2; an isolated vertex is
        its own trivial component.
        """
        if self.is_connected():
            if self.euler_characteristic != 2:
                raise NotPlaneGraphError(f"V - E + F = {self.euler_characteristic}, expected 2")
            return
        for comp in self.components:
            if len(comp) == 1:
                continue
            members = set(comp)
            e = sum(1 for a, b in self.edges if a in members)
            f = sum(1 for face in self.faces if face[0] in members)
            if len(comp) - e + f != 2:
                raise NotPlaneGraphError(f"component {comp} has V - E + F = {len(comp) - e + f}")

    def relabeled(self, perm) -> "PlaneGraph":
        """Copy with vertex ``v`` renamed ``perm[v]``."""
        rot = [None] * self.n
        for v, nbrs in enumerate(self.rotation):
            rot[perm[v]] = tuple(perm[w] for w in nbrs)
        return PlaneGraph(tuple(rot), self.embedding_source)

    def mirrored(self) -> "PlaneGraph":
        return PlaneGraph(tuple(tuple(reversed(n)) for n in self.rotation), self.embedding_source + "~")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "edges": [list(e) for e in self.edges],
            "faces": [list(f) for f in self.faces],
            "rotation": [list(r) for r in self.rotation],
        }

    @classmethod
    def from_dict(cls, data: dict, source: str = "") -> "PlaneGraph":
        return cls(tuple(tuple(r) for r in data["rotation"]), source)


def path_graph(n: int) -> PlaneGraph:
    rot = [tuple(w for w in (v - 1, v + 1) if 0 <= w < n) for v in range(n)]
    return PlaneGraph(tuple(rot), "path")


def cycle_graph(n: int) -> PlaneGraph:
    return PlaneGraph(tuple(((v + 1) % n, (v - 1) % n) for v in range(n)), "cycle")


def _arcs_cross(a, b, c, d) -> bool:
    """Do the minor great-circle arcs ab and cd cross at an interior point?"""
    n1, n2 = np.cross(a, b), np.cross(c, d)
    line = np.cross(n1, n2)
    norm = np.linalg.norm(line)
    if norm < 1e-12:
        return False  # same great circle; overlap is caught by the Euler check
    line /= norm
    for p in (line, -line):
        if (np.cross(a, p) @ n1 > 1e-12 and np.cross(p, b) @ n1 > 1e-12
                and np.cross(c, p) @ n2 > 1e-12 and np.cross(p, d) @ n2 > 1e-12):
            return True
    return False


def star_graph(s: LocalStar) -> PlaneGraph:
    """Plane graph of a star, embedded by radial projection."""
    u = s.u_set - s.center
    if len(u) == 0:
        raise ValueError("star has no near neighbours")
    if len(u) < 4 or np.linalg.matrix_rank(u, tol=1e-9) < 3:
        raise ValueError("neighbour directions do not span space")
    dirs = u / np.linalg.norm(u, axis=1)[:, None]
    n = len(u)
    dist = np.linalg.norm(u[:, None] - u[None], axis=-1)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if dist[i, j] <= TRUNCATION + EDGE_TOL]

    for x, (i, j) in enumerate(edges):
        for k, l in edges[x + 1:]:
            if len({i, j, k, l}) == 4 and _arcs_cross(dirs[i], dirs[j], dirs[k], dirs[l]):
                raise NotPlaneGraphError(f"edges {i}-{j} and {k}-{l} cross")

    nbrs = [[] for _ in range(n)]
    for i, j in edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    rotation = []
    for i in range(n):
        d = dirs[i]
        ref = np.eye(3)[np.argmin(np.abs(d))]
        e1 = np.cross(d, ref)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(d, e1)
        ang = [math.atan2(dirs[j] @ e2, dirs[j] @ e1) for j in nbrs[i]]
        rotation.append(tuple(nbrs[i][k] for k in np.argsort(ang, kind="stable")))
    g = PlaneGraph(tuple(rotation), s.label, dirs)
    g.validate()
    return g


def hull_faces(directions) -> list[tuple]:
    """Facets of the hull of unit directions, coplanar triangles merged.

    Independent of the rotation-system tracing in :func:`star_graph`; for
    tangent configurations the two must agree.
    """
    pts = np.asarray(directions, dtype=float)
    hull = ConvexHull(pts)
    groups: list[list] = []
    for eq, simplex in zip(hull.equations, hull.simplices):
        for g in groups:
            if np.linalg.norm(g[0][:3] - eq[:3]) < COPLANAR_TOL and abs(g[0][3] - eq[3]) < COPLANAR_TOL:
                g[1].update(simplex.tolist())
                break
        else:
            groups.append([eq, set(simplex.tolist())])
    return [tuple(sorted(g[1])) for g in groups]


# --- canonical form and classification --------------------------------------

def _bfs_code(g: PlaneGraph, u: int, v: int, orient: int):
    label = {u: 1}
    order = [u]
    start = {u: v}
    code = []
    head = 0
    while head < len(order):
        w = order[head]
        head += 1
        nbrs = g.rotation[w]
        k0 = nbrs.index(start[w])
        for step in range(len(nbrs)):
            y = nbrs[(k0 + orient * step) % len(nbrs)]
            if y not in label:
                label[y] = len(order) + 1
                order.append(y)
                start[y] = w
            code.append(label[y])
        code.append(0)
    return tuple(code), label


def canonical_labeling(g: PlaneGraph, vertices=None) -> tuple[tuple, dict]:
    """Least BFS code over all starting darts and both orientations.

    Restricted to ``vertices`` (one connected component) when given.
    """
    best = None
    for u in range(g.n) if vertices is None else vertices:
        for v in g.rotation[u]:
            for orient in (1, -1):
                code, label = _bfs_code(g, u, v, orient)
                if best is None or code < best[0]:
                    best = (code, label)
    if best is None:
        if vertices is not None and len(vertices) == 1:
            return (), {vertices[0]: 1}
        if g.n == 0:
            return (), {}
        raise ValueError("canonical_labeling needs a connected graph")
    return best


def canonical_form(g: PlaneGraph) -> bytes:
    """Canonical byte code; equal codes mean isomorphic plane graphs.

    Mirror images get the same code.  Components are encoded separately and
    sorted, so their relative placement on the sphere is not recorded.
    """
    codes = sorted(canonical_labeling(g, comp)[0] for comp in g.components)
    words = []
    for i, code in enumerate(codes):
        if i:
            words.append(0xFFFF)
        words.extend(code)
    return len(words).to_bytes(2, "big") + b"".join(w.to_bytes(2, "big") for w in words)


REFERENCE_KINDS = ("FCC", "HCP", "PENT")
_DEFAULT_REFERENCES = "reference_graphs.json"


@dataclass(frozen=True)
class GraphClass:
    kind: str  # FCC, HCP, PENT or OTHER
    certificate: dict | None = None  # vertex of g -> vertex of the reference graph


def reference_stars() -> dict:
    from .packing import fcc_packing, hcp_packing

    out = {}
    for kind, p in (("FCC", fcc_packing(6.0)), ("HCP", hcp_packing(6.0))):
        out[kind] = local_star(p, p.index_of((0.0, 0.0, 0.0)))
    out["PENT"] = pent_star()
    return out


def build_references() -> dict:
    data = {}
    for kind, star in reference_stars().items():
        g = star_graph(star)
        entry = g.to_dict()
        entry["canonical_code_hex"] = canonical_form(g).hex()
        data[kind] = entry
    return data


def emit_references(path) -> None:
    from . import jsonio

    jsonio.write_json(path, build_references())


def default_reference_path() -> Path:
    return Path(str(resources.files("keplerkit") / "data" / _DEFAULT_REFERENCES))


@lru_cache(maxsize=8)
def load_references(path: str | None = None) -> dict:
    with open(path or default_reference_path(), encoding="utf-8") as fh:
        raw = json.load(fh)
    refs = {}
    for kind in REFERENCE_KINDS:
        entry = raw[kind]
        graph = PlaneGraph.from_dict(entry, kind)
        code = bytes.fromhex(entry["canonical_code_hex"])
        if canonical_form(graph) != code:
            raise ValueError(f"reference graph {kind}: stored canonical code does not match its graph")
        refs[kind] = (code, graph, canonical_labeling(graph)[1])
    return refs


def classify(g: PlaneGraph, references: str | None = None) -> GraphClass:
    packed = canonical_form(g)
    for kind, (ref_code, ref_graph, ref_label) in load_references(references).items():
        if packed != ref_code:
            continue
        _, label = canonical_labeling(g)
        inverse = {lab: v for v, lab in ref_label.items()}
        return GraphClass(kind, {v: inverse[label[v]] for v in range(g.n)})
    return GraphClass("OTHER")


def is_isomorphism(g: PlaneGraph, h: PlaneGraph, mapping: dict) -> bool:
    """Check that ``mapping`` carries edges and faces of ``g`` onto those of ``h``."""
    if sorted(mapping.values()) != list(range(h.n)) or len(mapping) != g.n:
        return False
    if {frozenset((mapping[a], mapping[b])) for a, b in g.edges} != set(h.adjacency):
        return False

    def cyc(f):
        return min(tuple(f[i:] + f[:i]) for i in range(len(f)))

    def canon(f):
        return min(cyc(f), cyc(f[::-1]))

    fg = sorted(canon(tuple(mapping[v] for v in f)) for f in g.faces)
    return fg == sorted(canon(tuple(f)) for f in h.faces)


# --- tameness-style predicates ---------------------------------------------

@dataclass(frozen=True)
class PredicateSet:
    """Structural checks on a plane graph.

    Illustrative, not the published tameness list.
    """

    min_vertices: int = 12
    max_vertices: int | None = None
    face_sizes: tuple = (3, 8)
    degrees: tuple = (2, 6)
    label: str = "illustrative, not the published tameness list"


def tame_predicates(g: PlaneGraph, config: PredicateSet = PredicateSet()) -> dict:
    lo_f, hi_f = config.face_sizes
    lo_d, hi_d = config.degrees
    checks = {
        "vertex_count": g.n >= config.min_vertices
        and (config.max_vertices is None or g.n <= config.max_vertices),
        "face_sizes": all(lo_f <= k <= hi_f for k in g.face_sizes),
        "simple_faces": g.faces_are_simple(),
        "degrees": all(lo_d <= g.degree(v) <= hi_d for v in range(g.n)),
    }
    return {"label": config.label, "checks": checks, "all_pass": all(checks.values())}
