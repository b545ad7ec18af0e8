"""Dense bounded-variable simplex and a branch-and-bound driver on top of it.

The driver certifies ``max f < target`` over a box by solving a linear
relaxation on each sub-box: a leaf closes as soon as its LP maximum is below
the target; otherwise the box is split along its widest side.  A sampled
point reaching the target refutes the claim instead.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

PIVOT_TOL = 1e-9
COST_TOL = 1e-9
FEAS_TOL = 1e-9
BLAND_AFTER = 1000
MAX_ITER = 100_000
SOUNDNESS_TOL = 1e-9


class LPStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """maximize ``c @ x`` subject to ``A @ x <= b`` and ``lower <= x <= upper``."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        n = len(c)
        A = np.asarray(self.A, dtype=float).reshape(-1, n)
        b = np.asarray(self.b, dtype=float).ravel()
        lo = np.broadcast_to(np.asarray(self.lower, dtype=float), (n,)).copy()
        hi = np.broadcast_to(np.asarray(self.upper, dtype=float), (n,)).copy()
        if len(b) != len(A):
            raise ValueError("A and b disagree on the number of constraints")
        if np.any(lo > hi):
            raise ValueError("lower bound above upper bound")
        for name, val in (("c", c), ("A", A), ("b", b)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def from_rows(cls, objective, constraints, bounds) -> "LinearProgram":
        """Build from ``[(coefficients, bound), ...]`` and ``[(lo, hi), ...]``."""
        n = len(objective)
        A = np.array([row for row, _ in constraints], dtype=float).reshape(-1, n)
        b = np.array([rhs for _, rhs in constraints], dtype=float)
        lo, hi = zip(*bounds) if bounds else ((), ())
        return cls(objective, A, b, lo, hi)

    @property
    def n(self) -> int:
        return len(self.c)


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    value: float | None = None
    x: np.ndarray | None = None
    iterations: int = 0


class _Tableau:
    def __init__(self, T, rhs, basis, ub):
        self.T = T
        self.basis = basis
        self.ub = ub
        self.x = np.zeros(T.shape[1])
        self.x[basis] = rhs
        self.at_upper = np.zeros(T.shape[1], dtype=bool)
        self.degenerate = 0
        self.iterations = 0

    def run(self, cost) -> bool:
        """Pivot to optimality for ``cost``; False means unbounded."""
        T, ub = self.T, self.ub
        while True:
            self.iterations += 1
            if self.iterations > MAX_ITER:
                raise RuntimeError("simplex iteration limit reached")
            d = cost - cost[self.basis] @ T
            d[self.basis] = 0.0
            movable = ub > 0
            up = movable & ~self.at_upper & (d > COST_TOL)
            down = movable & self.at_upper & (d < -COST_TOL)
            cand = np.flatnonzero(up | down)
            if not len(cand):
                return True
            if self.degenerate >= BLAND_AFTER:
                j = int(cand[0])
            else:
                j = int(cand[np.argmax(np.abs(d[cand]))])
            t = 1.0 if up[j] else -1.0
            col = t * T[:, j]
            xb = self.x[self.basis]
            ubb = ub[self.basis]
            ratios = np.full(len(col), np.inf)
            dec = col > PIVOT_TOL
            ratios[dec] = np.maximum(xb[dec], 0.0) / col[dec]
            inc = (col < -PIVOT_TOL) & np.isfinite(ubb)
            ratios[inc] = np.maximum(ubb[inc] - xb[inc], 0.0) / -col[inc]
            theta_flip = ub[j]
            theta_row = ratios.min() if len(ratios) else np.inf
            if not np.isfinite(min(theta_row, theta_flip)):
                return False
            if theta_flip <= theta_row:
                theta = theta_flip
                self.x[j] += t * theta
                self.x[self.basis] -= theta * col
                self.at_upper[j] = not self.at_upper[j]
            else:
                theta = theta_row
                ties = np.flatnonzero(ratios <= theta + 1e-12)
                r = int(ties[np.argmin(self.basis[ties])])
                self.x[j] += t * theta
                self.x[self.basis] -= theta * col
                leaving = self.basis[r]
                hit_upper = col[r] < 0
                self.x[leaving] = ub[leaving] if hit_upper else 0.0
                self.at_upper[leaving] = hit_upper
                self.at_upper[j] = False
                self.pivot(r, j)
            self.degenerate += theta <= 1e-12

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        others = np.arange(len(T)) != r
        T[others] -= np.outer(T[others, j], T[r])
        self.basis[r] = j


def simplex_max(lp: LinearProgram) -> LPResult:
    """Maximise a linear program with the bounded-variable simplex method.

    Dantzig pricing, switching to Bland's rule for good after
    ``BLAND_AFTER`` degenerate pivots.  Two phases with artificial variables.
    """
    n, m = lp.n, len(lp.b)
    # substitute x = offset + M y with y >= 0
    cols, offset, ub = [], np.zeros(n), []
    for j in range(n):
        lo, hi = lp.lower[j], lp.upper[j]
        e = np.zeros(n)
        if np.isfinite(lo):
            e[j] = 1.0
            offset[j] = lo
            cols.append(e)
            ub.append(hi - lo)
        elif np.isfinite(hi):
            e[j] = -1.0
            offset[j] = hi
            cols.append(e)
            ub.append(np.inf)
        else:
            e[j] = 1.0
            cols += [e, -e]
            ub += [np.inf, np.inf]
    M = np.array(cols).T.reshape(n, -1)
    ny = M.shape[1]
    Ay = lp.A @ M
    by = lp.b - lp.A @ offset
    cy = lp.c @ M
    const = float(lp.c @ offset)

    neg = by < 0
    k = int(neg.sum())
    T = np.zeros((m, ny + m + k))
    sign = np.where(neg, -1.0, 1.0)
    T[:, :ny] = sign[:, None] * Ay
    T[np.arange(m), ny + np.arange(m)] = sign
    art_cols = ny + m + np.arange(k)
    T[np.flatnonzero(neg), art_cols] = 1.0
    basis = ny + np.arange(m)
    basis[neg] = art_cols
    ubs = np.concatenate([ub, np.full(m + k, np.inf)])
    tab = _Tableau(T, sign * by, basis.astype(np.intp), ubs)

    if k:
        cost1 = np.zeros(T.shape[1])
        cost1[art_cols] = -1.0
        tab.run(cost1)
        if tab.x[art_cols].sum() > FEAS_TOL * max(1.0, np.abs(by).max()):
            return LPResult(LPStatus.INFEASIBLE, iterations=tab.iterations)
        _drive_out_artificials(tab, art_cols)
        tab.ub[art_cols] = 0.0
        tab.x[art_cols] = 0.0

    cost2 = np.zeros(tab.T.shape[1])
    cost2[:ny] = cy
    if not tab.run(cost2):
        return LPResult(LPStatus.UNBOUNDED, iterations=tab.iterations)
    y = tab.x[:ny]
    x = offset + M @ y
    x = np.clip(x, lp.lower, lp.upper)
    return LPResult(LPStatus.OPTIMAL, float(cy @ y + const), x, tab.iterations)


def _drive_out_artificials(tab: _Tableau, art_cols) -> None:
    arts = set(int(a) for a in art_cols)
    r = 0
    while r < len(tab.basis):
        if int(tab.basis[r]) in arts:
            row = tab.T[r].copy()
            row[list(arts)] = 0.0
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > PIVOT_TOL:
                tab.at_upper[j] = False
                tab.pivot(r, j)
            else:
                # redundant equality row
                tab.T = np.delete(tab.T, r, axis=0)
                tab.basis = np.delete(tab.basis, r)
                continue
        r += 1


# --- branch and bound ------------------------------------------------------

class SoundnessViolation(RuntimeError):
    """A sampled objective value exceeded the relaxation bound on its box."""


@dataclass(frozen=True)
class RelaxableProblem:
    """Maximise ``objective`` over the box ``[lower, upper]``.

    ``relaxer(lo, hi)`` must return an LP whose first ``dimension`` variables
    are the problem variables and whose maximum bounds the objective on the
    sub-box from above.
    """

    lower: np.ndarray
    upper: np.ndarray
    objective: Callable
    relaxer: Callable
    name: str = ""

    @property
    def dimension(self) -> int:
        return len(self.lower)


@dataclass(frozen=True)
class Leaf:
    lower: tuple
    upper: tuple
    bound: float
    depth: int


@dataclass(frozen=True)
class BoundCertificate:
    target: float
    leaves: tuple
    node_count: int
    max_depth: int

    @property
    def global_bound(self) -> float:
        return max(leaf.bound for leaf in self.leaves)

    @property
    def verified(self) -> bool:
        return self.global_bound < self.target

    def to_dict(self) -> dict:
        return {
            "outcome": "certificate",
            "target": self.target,
            "global_bound": self.global_bound,
            "verified": self.verified,
            "node_count": self.node_count,
            "max_depth": self.max_depth,
            "leaves": [
                {"box": [list(leaf.lower), list(leaf.upper)], "bound": leaf.bound}
                for leaf in self.leaves
            ],
        }


@dataclass(frozen=True)
class Refuted:
    point: np.ndarray
    value: float
    target: float
    node_count: int

    def to_dict(self) -> dict:
        return {"outcome": "refuted", "target": self.target, "value": self.value,
                "point": self.point.tolist(), "node_count": self.node_count}


@dataclass(frozen=True)
class Inconclusive:
    target: float
    node_count: int
    open_boxes: int
    best_bound: float
    closed: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {"outcome": "inconclusive", "target": self.target, "node_count": self.node_count,
                "open_boxes": self.open_boxes, "best_bound": self.best_bound}


def _sample_points(p: RelaxableProblem, lo, hi, lp_x, rng, extra: int):
    pts = [(lo + hi) / 2.0]
    if lp_x is not None:
        pts.append(np.clip(lp_x[: p.dimension], lo, hi))
    pts.extend(rng.uniform(lo, hi) for _ in range(extra))
    return pts


def branch_and_bound(p: RelaxableProblem, target: float, max_nodes: int = 100_000,
                     samples_per_box: int = 2, seed: int = 0):
    """Certify ``max objective < target`` on the root box, or refute it.

    Returns a :class:`BoundCertificate`, a :class:`Refuted` witness, or
    :class:`Inconclusive` once ``max_nodes`` boxes have been processed.
    """
    rng = np.random.default_rng(seed)
    lower = np.asarray(p.lower, dtype=float)
    upper = np.asarray(p.upper, dtype=float)
    stack = [(lower, upper, 0)]
    leaves = []
    nodes = 0
    max_depth = 0
    while stack:
        if nodes >= max_nodes:
            return Inconclusive(target, nodes, len(stack), max(
                [leaf.bound for leaf in leaves] + [math.inf]), tuple(leaves))
        lo, hi, depth = stack.pop()
        nodes += 1
        max_depth = max(max_depth, depth)
        res = simplex_max(p.relaxer(lo, hi))
        if res.status is LPStatus.INFEASIBLE:
            bound, lp_x = -math.inf, None
        elif res.status is LPStatus.UNBOUNDED:
            bound, lp_x = math.inf, None
        else:
            bound, lp_x = res.value, res.x

        best_val, best_pt = -math.inf, None
        for q in _sample_points(p, lo, hi, lp_x, rng, samples_per_box):
            val = float(p.objective(q))
            if val > bound + SOUNDNESS_TOL:
                raise SoundnessViolation(
                    f"objective {val!r} at {q.tolist()} exceeds relaxation bound {bound!r}"
                )
            if val > best_val:
                best_val, best_pt = val, q

        if bound < target:
            leaves.append(Leaf(tuple(lo), tuple(hi), bound, depth))
            continue
        if best_val >= target:
            return Refuted(best_pt, best_val, target, nodes)
        axis = int(np.argmax(hi - lo))
        mid = 0.5 * (lo[axis] + hi[axis])
        left_hi, right_lo = hi.copy(), lo.copy()
        left_hi[axis] = mid
        right_lo[axis] = mid
        stack.append((right_lo, hi, depth + 1))
        stack.append((lo, left_hi, depth + 1))
    leaves.sort(key=lambda leaf: (leaf.lower, leaf.upper))
    return BoundCertificate(float(target), tuple(leaves), nodes, max_depth)


def audit_tiling(cert: BoundCertificate, lower, upper, rtol: float = 1e-9) -> bool:
    """Leaf boxes lie in the root box, overlap in measure zero and fill it."""
    lower, upper = np.asarray(lower, float), np.asarray(upper, float)
    lo = np.array([leaf.lower for leaf in cert.leaves])
    hi = np.array([leaf.upper for leaf in cert.leaves])
    if np.any(lo < lower - 1e-12) or np.any(hi > upper + 1e-12):
        return False
    root = float(np.prod(upper - lower))
    if abs(np.prod(hi - lo, axis=1).sum() - root) > rtol * root:
        return False
    for i in range(len(lo)):
        overlap = np.minimum(hi[i], hi[i + 1:]) - np.maximum(lo[i], lo[i + 1:])
        if np.any(np.all(overlap > 1e-12, axis=1)):
            return False
    return True


def audit_soundness(cert: BoundCertificate, objective, samples: int = 100, seed: int = 1) -> bool:
    """Random objective values in every leaf stay below the leaf bound."""
    rng = np.random.default_rng(seed)
    for leaf in cert.leaves:
        pts = rng.uniform(leaf.lower, leaf.upper, size=(samples, len(leaf.lower)))
        if any(objective(q) > leaf.bound + SOUNDNESS_TOL for q in pts):
            return False
    return True


# --- separable concave relaxations and demo problems -----------------------

@dataclass(frozen=True)
class ConcaveTerm:
    """One summand ``f(x[var])`` of a separable concave objective."""

    var: int
    f: Callable
    df: Callable
    peak: float | None = None  # unconstrained maximiser, if any


def separable_concave_relaxer(terms, dimension: int, constant: float = 0.0):
    """Relaxer for ``constant + sum f_k(x[var_k])`` with concave ``f_k``.

    Each term gets an auxiliary variable capped by tangent lines at the box
    ends, the midpoint and (when inside the box) the term's peak.
    """
    terms = list(terms)

    def relax(lo, hi) -> LinearProgram:
        nt = len(terms)
        n = dimension + nt
        rows, rhs = [], []
        t_lo = np.empty(nt)
        for k, term in enumerate(terms):
            a, b = lo[term.var], hi[term.var]
            pts = {a, b, 0.5 * (a + b)}
            if term.peak is not None and a <= term.peak <= b:
                pts.add(term.peak)
            for s in sorted(pts):
                # t_k <= f(s) + f'(s) (x - s)
                row = np.zeros(n)
                row[dimension + k] = 1.0
                row[term.var] = -term.df(s)
                rows.append(row)
                rhs.append(term.f(s) - term.df(s) * s)
            # a concave function attains its minimum over [a, b] at an end
            t_lo[k] = min(term.f(a), term.f(b))
        c = np.concatenate([np.zeros(dimension), np.ones(nt)])
        lp = LinearProgram(c, np.array(rows).reshape(-1, n), np.array(rhs),
                           np.concatenate([lo, t_lo]), np.concatenate([hi, np.full(nt, np.inf)]))
        return _shift_objective(lp, constant)

    return relax


def _shift_objective(lp: LinearProgram, constant: float) -> LinearProgram:
    if constant == 0.0:
        return lp
    # constant folded into a fixed extra variable
    return LinearProgram(
        np.append(lp.c, constant), np.hstack([lp.A, np.zeros((len(lp.b), 1))]), lp.b,
        np.append(lp.lower, 1.0), np.append(lp.upper, 1.0),
    )


def neg_sum_squares_problem(dim: int = 3) -> RelaxableProblem:
    """Maximise ``-sum x_i^2`` over ``[-1, 1]^dim``; the maximum is 0."""
    terms = [ConcaveTerm(i, lambda x: -x * x, lambda x: -2.0 * x, 0.0) for i in range(dim)]
    return RelaxableProblem(
        -np.ones(dim), np.ones(dim), lambda x: -float(np.sum(np.square(x))),
        separable_concave_relaxer(terms, dim), "neg_sum_squares",
    )


def sum_sin_problem(dim: int = 2) -> RelaxableProblem:
    """Maximise ``sum sin x_i`` over ``[0, pi/2]^dim``; the maximum is ``dim``."""
    terms = [ConcaveTerm(i, math.sin, math.cos, math.pi / 2) for i in range(dim)]
    return RelaxableProblem(
        np.zeros(dim), np.full(dim, math.pi / 2), lambda x: float(np.sum(np.sin(x))),
        separable_concave_relaxer(terms, dim), "sum_sin",
    )


TOY_EDGE_RANGE = (2.0, 2.51)
TOY_PEAK = 2.2


def toy_face_weight(k: int) -> float:
    return 1.0 / k


def toy_face_optimum(k: int) -> float:
    """Closed-form maximum of one k-gon's toy term (all edges at the peak)."""
    return toy_face_weight(k)


def toy_face_score_problem(g) -> RelaxableProblem:
    """Stand-in score on a plane graph, one variable per edge in [2, 2.51].

    score = sum over faces F of ( 1/|F| - sum_{e in F} (y_e - 2.2)^2 ).
    This is a methodological toy, not a packing score.
    """
    edge_index = {frozenset(e): i for i, e in enumerate(g.edges)}
    terms = []
    constant = 0.0
    face_edges = []
    for face in g.faces:
        constant += toy_face_weight(len(face))
        idx = [edge_index[frozenset((face[i], face[(i + 1) % len(face)]))] for i in range(len(face))]
        face_edges.append((toy_face_weight(len(face)), idx))
        for e in idx:
            terms.append(ConcaveTerm(e, lambda y: -(y - TOY_PEAK) ** 2,
                                     lambda y: -2.0 * (y - TOY_PEAK), TOY_PEAK))

    def objective(y):
        return float(sum(w - sum((y[e] - TOY_PEAK) ** 2 for e in idx) for w, idx in face_edges))

    dim = len(g.edges)
    return RelaxableProblem(
        np.full(dim, TOY_EDGE_RANGE[0]), np.full(dim, TOY_EDGE_RANGE[1]), objective,
        separable_concave_relaxer(terms, dim, constant), "toy_face_score",
    )


def toy_optimum(g) -> float:
    return float(sum(toy_face_optimum(len(f)) for f in g.faces))


def face_score_demo(g, target: float, max_nodes: int = 100_000):
    return branch_and_bound(toy_face_score_problem(g), target, max_nodes)
