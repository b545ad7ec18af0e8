"""Slow, independent reference computations used to cross-check fast paths.

Nothing here shares code with the routines it checks: volumes come from
random sampling, LP optima from enumerating vertices, maxima from grids.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.spatial import cKDTree


def mc_union_volume(centers, x, r: float, samples: int, seed: int = 0, chunk: int = 1_000_000):
    """Monte-Carlo volume of ``B(x, r)`` covered by unit balls at ``centers``.

    Returns ``(estimate, standard_error)``.
    """
    rng = np.random.default_rng(seed)
    x = np.asarray(x, dtype=float)
    tree = cKDTree(np.asarray(centers, dtype=float))
    hits = 0
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        # uniform in the ball: direction times radius * u^(1/3)
        d = rng.normal(size=(k, 3))
        d /= np.linalg.norm(d, axis=1)[:, None]
        pts = x + d * (r * rng.random(k) ** (1 / 3))[:, None]
        dist, _ = tree.query(pts, distance_upper_bound=1.0 + 1e-9, workers=-1)
        hits += int(np.count_nonzero(dist <= 1.0))
        done += k
    vol = 4.0 * math.pi * r**3 / 3.0
    p = hits / samples
    return vol * p, vol * math.sqrt(p * (1 - p) / samples)


def mc_polytope_volume(normals, offsets, box_lo, box_hi, samples: int, seed: int = 0):
    """Rejection-sampling volume of ``{p : normals @ p <= offsets}`` inside a box."""
    rng = np.random.default_rng(seed)
    lo, hi = np.asarray(box_lo, float), np.asarray(box_hi, float)
    pts = rng.uniform(lo, hi, size=(samples, 3))
    inside = np.all(pts @ np.asarray(normals).T <= np.asarray(offsets), axis=1)
    p = inside.mean()
    vol = float(np.prod(hi - lo))
    return vol * p, vol * math.sqrt(p * (1 - p) / samples)


def mc_lens_volume(d: float, r1: float, r2: float, samples: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    r = min(r1, r2)
    big, small = (r2, r1) if r1 <= r2 else (r1, r2)
    # sample the smaller ball, count points inside the other
    v = rng.normal(size=(samples, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    pts = v * (small * rng.random(samples) ** (1 / 3))[:, None]
    inside = np.linalg.norm(pts - np.array([d, 0.0, 0.0]), axis=1) <= big
    p = inside.mean()
    vol = 4.0 * math.pi * r**3 / 3.0
    return vol * p, vol * math.sqrt(p * (1 - p) / samples)


def lp_vertex_enumeration(c, A, b, lower, upper) -> float:
    """Maximum of a bounded LP by checking every basic solution.

    Returns ``-inf`` when no vertex is feasible.
    """
    c = np.asarray(c, float)
    n = len(c)
    rows = [np.asarray(A, float).reshape(-1, n)]
    rhs = [np.asarray(b, float)]
    rows += [np.eye(n), -np.eye(n)]
    rhs += [np.asarray(upper, float), -np.asarray(lower, float)]
    R, h = np.vstack(rows), np.concatenate(rhs)
    combos = np.array(list(itertools.combinations(range(len(R)), n)), dtype=np.intp)
    mats = R[combos]
    ok = np.abs(np.linalg.det(mats)) > 1e-10
    if not ok.any():
        return -math.inf
    xs = np.linalg.solve(mats[ok], h[combos[ok]][..., None])[..., 0]
    feasible = np.all(xs @ R.T <= h + 1e-9, axis=1)
    if not feasible.any():
        return -math.inf
    return float((xs[feasible] @ c).max())


def grid_max(f, lower, upper, points_per_axis: int = 201):
    """Maximum of ``f`` over a regular grid (endpoints included)."""
    axes = [np.linspace(lo, hi, points_per_axis) for lo, hi in zip(lower, upper)]
    best, arg = -math.inf, None
    for q in itertools.product(*axes):
        v = f(np.array(q))
        if v > best:
            best, arg = v, np.array(q)
    return best, arg


def random_bounded_lp(rng, max_vars: int = 6, max_constraints: int = 10):
    n = int(rng.integers(1, max_vars + 1))
    m = int(rng.integers(0, max_constraints + 1))
    c = rng.normal(size=n)
    A = rng.normal(size=(m, n))
    b = rng.normal(size=m)
    lower = -rng.uniform(0.0, 2.0, n)
    upper = rng.uniform(0.0, 2.0, n)
    return c, A, b, lower, upper
