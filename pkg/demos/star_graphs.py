"""
Plane graphs of kissing stars
=============================

Twelve neighbours at distance 2, edges between pairs closer than 2.51.
"""

from keplerkit import packing, stargraph

graphs = {kind: stargraph.star_graph(s) for kind, s in stargraph.reference_stars().items()}
for kind, g in graphs.items():
    print(kind, "V", g.n, "E", len(g.edges), "F", len(g.faces), "faces", g.face_size_counts(),
          "code", stargraph.canonical_form(g).hex()[:16] + "...")

# fcc and hcp share a face vector but are different plane graphs
print("fcc == hcp ?", stargraph.canonical_form(graphs["FCC"]) == stargraph.canonical_form(graphs["HCP"]))

# every interior vertex of an hcp window gives the same graph
hcp = packing.hcp_packing(10.0)
kinds = {stargraph.classify(stargraph.star_graph(stargraph.local_star(hcp, int(i)))).kind
         for i in hcp.interior_indices}
print("hcp window classes:", kinds)

# a random saturated packing mostly gives other graphs
rand = packing.random_saturated_packing(10.0, seed=3)
for i in rand.interior_indices[:8]:
    s = stargraph.local_star(rand, int(i))
    try:
        g = stargraph.star_graph(s)
    except ValueError as exc:
        print(int(i), "no plane graph:", exc)
        continue
    print(int(i), "|U| =", len(s.u_set), stargraph.classify(g).kind, stargraph.tame_predicates(g)["all_pass"])
