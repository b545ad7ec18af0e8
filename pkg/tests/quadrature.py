"""Numerical-integration oracle shared by the geometry and constants tests."""

import numpy as np


def triangle_solid_angle(apex, a, b, c, n=600):
    """Solid angle of triangle abc seen from apex, by midpoint quadrature.

    dOmega = |r . n| dA / |r|^3 summed over an n x n barycentric subdivision.
    """
    o = np.asarray(apex, float)
    a, b, c = (np.asarray(p, float) - o for p in (a, b, c))
    normal = np.cross(b - a, c - a)
    area2 = np.linalg.norm(normal)
    normal /= area2
    total = 0.0
    for i in range(n):
        j = np.arange(n - i)
        # upward and downward sub-triangles, sampled at their centroids
        for shift, count in (((1 / 3, 1 / 3), j), ((2 / 3, 2 / 3), j[:-1])):
            u = (i + shift[0]) / n
            v = (count + shift[1]) / n
            pts = a + np.outer(np.full_like(v, u), b - a) + np.outer(v, c - a)
            r = np.linalg.norm(pts, axis=1)
            total += np.sum(np.abs(pts @ normal) / r**3)
    return total * area2 / 2 / n**2
