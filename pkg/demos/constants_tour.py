"""
The constants behind the 8 pt target
====================================

Every constant is computed, then checked against a second route.
"""

import math

from keplerkit import constants

# delta_tet: density of a regular tetrahedron covered by the four vertex balls
print("delta_tet  closed form   ", constants.delta_tet())
print("delta_tet  solid angles  ", constants.delta_tet_from_solid_angles())

# the octahedral analogue, from the vertex solid angle 4 arcsin(1/3)
print("delta_oct                ", constants.delta_oct())

# the unit in which star scores are measured
pt = constants.pt()
print("pt = -pi/3 + sqrt2 delta_tet =", pt, "  8 pt =", 8 * pt)

# the cell-volume identity: a star of score 8 pt leaves exactly sqrt32
lhs = constants.fcc_cell_volume_from_score(8 * pt)
print("-8pt/(4 d_oct) + 4pi/(3 d_oct) =", lhs, " sqrt32 =", math.sqrt(32))

# the dodecahedral bound sits between the fcc density and delta_tet
print(constants.fcc_density(), "<", constants.dodecahedral_bound(), "<", constants.delta_tet())

for c in constants.all_constants():
    print(f"{c.name:>20}  {c.value:.15f}  oracle ok: {c.verified}")
