"""
Finite densities and the C/r law
================================

A(x, r) is a plain sum of lens volumes because the balls are disjoint.
"""

from keplerkit import constants, density, oracles, packing
from keplerkit.voronoi import VertexFunction

rho = constants.fcc_density()
p = packing.fcc_packing(41.0)

for c in density.lemma_bound_check(p, (0, 0, 0), [5, 10, 20, 40], C1=0.0):
    print(f"r={c.r:4.0f}  delta={c.delta:.6f}  bound={c.bound:.6f}  ok={c.satisfied}"
          f"  r(delta - rho)={c.scaled_excess:+.5f}  inequality(1) ok={c.count_bound_holds}")

# an independent check of one covered volume by sampling
small = packing.fcc_packing(11.0)
A = density.covered_volume(small, (0, 0, 0), 10.0)
est, se = oracles.mc_union_volume(small.centers, (0, 0, 0), 10.0, 2_000_000, seed=1)
print(f"A = {A:.4f}, Monte Carlo {est:.4f} +- {se:.4f}")

# the cell-volume chain behind the bound, on fcc and on the cubic lattice
for q in (packing.fcc_packing(11.0), packing.cubic_packing(11.0)):
    audit = density.inequality2_audit(q, VertexFunction.constant(q, 0.0), (0, 0, 0), 6.0, C1=0.0)
    print(q.label, f"left {audit.left:.2f} <= middle {audit.middle:.2f} <= right {audit.right:.2f}:", audit.holds)
