"""
Voronoi cells of fcc, hcp and a random saturated packing
========================================================
"""

import math

import numpy as np

from keplerkit import packing, voronoi

fcc = packing.fcc_packing(8.0)
hcp = packing.hcp_packing(8.0)

# every interior cell of either lattice has volume sqrt32
for p in (fcc, hcp):
    vols = np.array([rec.volume for rec in voronoi.interior_cells(p)])
    print(p.label, len(vols), "cells, max |vol - sqrt32| =", np.abs(vols - math.sqrt(32)).max())

# the fcc cell is a rhombic dodecahedron with circumradius sqrt2
rec = voronoi.voronoi_cell(fcc, fcc.index_of((0, 0, 0)))
print("faces", rec.face_count, "vertices", len(rec.cell.vertices), "circumradius", rec.circumradius)

# a saturated packing: cells stay inside radius 2 of their centres
rand = packing.random_saturated_packing(10.0, seed=3)
print("saturation:", packing.check_saturation(rand, 0.25))
cells = voronoi.interior_cells(rand)
vols = np.array([c.volume for c in cells])
print(len(cells), "cells; volume range", vols.min(), vols.max(),
      "; max circumradius", max(c.circumradius for c in cells))

# a(v) = max(0, sqrt32 - vol) is the smallest fcc-compatible choice
a = voronoi.deficit_function(rand)
margins = voronoi.fcc_compatibility_check(rand, a)
print("compatible:", voronoi.is_fcc_compatible(margins), "; cells below sqrt32:", int((vols < math.sqrt(32)).sum()))
