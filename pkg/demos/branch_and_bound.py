"""
Linear relaxations and branch and bound
=======================================

The face score here is a toy stand-in, not a packing score: for each face,
1/|F| minus the squared distance of its edge lengths from 2.2.
"""

from keplerkit import lp, stargraph

# a textbook LP first
prog = lp.LinearProgram.from_rows([1, 1], [([1, 0], 1), ([0, 1], 1)], [(0, 2), (0, 2)])
print(lp.simplex_max(prog))

# sum of sines: refuted below its maximum, certified above it
prob = lp.sum_sin_problem(2)
print(lp.branch_and_bound(prob, 1.9))
cert = lp.branch_and_bound(prob, 2.1)
print("bound", cert.global_bound, "verified", cert.verified,
      "tiling", lp.audit_tiling(cert, prob.lower, prob.upper),
      "sampling", lp.audit_soundness(cert, prob.objective))

# the toy score on the pentagonal-prism graph
g = stargraph.star_graph(stargraph.pent_star())
opt = lp.toy_optimum(g)
for target in (opt + 0.01, opt - 0.01):
    out = lp.face_score_demo(g, target)
    print(f"target {target:.4f}:", type(out).__name__,
          getattr(out, "global_bound", getattr(out, "value", None)))
