"""End-to-end checks behind ``keplerkit verify-all`` and the acceptance tests.

Each check returns a :class:`CheckResult`; the tolerances are fixed here and
nowhere else.
"""

from __future__ import annotations

import itertools
import math
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import constants, density, lp, oracles, packing, stargraph, voronoi

SQRT32 = math.sqrt(32.0)


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.criterion}. {self.name}: {self.detail}"


def _result(criterion, name, passed, detail):
    return CheckResult(criterion, name, bool(passed), detail)


def _label(criterion: int, name: str):
    def wrap(fn):
        fn.criterion, fn.label = criterion, name
        return fn
    return wrap


# 1. constants

@_label(1, "delta_tet")
def check_delta_tet():
    closed = math.sqrt(8) * math.atan(math.sqrt(2) / 5)
    val = constants.delta_tet()
    sa = constants.delta_tet_from_solid_angles()
    ok = abs(val - closed) <= 1e-12 and abs(val - sa) <= 1e-9
    return _result(1, "delta_tet", ok, f"value={val:.15g} solid-angle={sa:.15g}")


@_label(1, "8pt")
def check_8pt():
    v = 8 * constants.pt()
    return _result(1, "8pt", abs(v - 0.442989) <= 1e-6, f"8pt={v:.12g} (target 0.442989 +- 1e-6)")


@_label(1, "delta_oct")
def check_delta_oct():
    v = constants.delta_oct()
    return _result(1, "delta_oct", abs(v - 0.72) <= 0.005, f"delta_oct={v:.12g} (target 0.72 +- 0.005)")


@_label(1, "pi/sqrt18")
def check_fcc_density():
    v = constants.fcc_density()
    return _result(1, "pi/sqrt18", abs(v - 0.74048) <= 1e-5, f"{v:.12g} (target 0.74048 +- 1e-5)")


# 2. score-to-volume identity

@_label(2, "score identity equals sqrt32")
def check_cell_volume_identity():
    p, d = constants.pt(), constants.delta_oct()
    lhs = -8 * p / (4 * d) + 4 * math.pi / (3 * d)
    return _result(2, "score identity equals sqrt32", abs(lhs - SQRT32) <= 1e-9,
                   f"lhs={lhs:.15g} |lhs-sqrt32|={abs(lhs - SQRT32):.2e}")


# 3. Voronoi cells

@_label(3, "fcc/hcp cell volume sqrt32")
def check_lattice_cells():
    worst = 0.0
    count = 0
    for p in (packing.fcc_packing(8.0), packing.hcp_packing(8.0)):
        for rec in voronoi.interior_cells(p):
            worst = max(worst, abs(rec.volume - SQRT32))
            count += 1
    return _result(3, "fcc/hcp cell volume sqrt32", count > 0 and worst <= 1e-9,
                   f"{count} interior cells, max |vol - sqrt32| = {worst:.2e}")


@_label(3, "saturated cell circumradius <= 2")
def check_saturated_circumradius(seed: int = 11):
    p = packing.random_saturated_packing(10.0, seed)
    radii = [rec.circumradius for rec in voronoi.interior_cells(p)]
    worst = max(radii)
    return _result(3, "saturated cell circumradius <= 2", len(radii) > 0 and worst <= 2 + 1e-9,
                   f"{len(radii)} interior cells of random(seed={seed}), max circumradius {worst:.9f}")


# 4. density law

@_label(4, "density C/r law on fcc")
def check_density_law():
    radii = [5.0, 10.0, 20.0, 40.0]
    p = packing.fcc_packing(41.0)
    checks = density.lemma_bound_check(p, (0.0, 0.0, 0.0), radii, C1=0.0)
    bounds_ok = all(c.satisfied for c in checks)
    ineq1 = all(c.count_bound_holds for c in checks)
    # running fitted constant max_{r' <= r} |r' (delta - pi/sqrt18)|
    running = np.maximum.accumulate([abs(c.scaled_excess) for c in checks])
    ratio = running[-1] / running[0]
    ok = bounds_ok and ineq1 and ratio <= 1.5
    return _result(4, "density C/r law on fcc", ok,
                   f"bounds ok={bounds_ok}, inequality(1) ok={ineq1}, |C| {running[0]:.3g}->{running[-1]:.3g} "
                   f"(ratio {ratio:.3f} <= 1.5)")


# 5. covered volume vs Monte Carlo

@_label(5, "covered volume vs Monte Carlo")
def check_covered_volume_mc(samples: int = 10**7, seed: int = 2024):
    p = packing.fcc_packing(11.0)
    A = density.covered_volume(p, (0.0, 0.0, 0.0), 10.0)
    est, se = oracles.mc_union_volume(p.centers, (0.0, 0.0, 0.0), 10.0, samples, seed)
    z = abs(A - est) / se
    return _result(5, "covered volume vs Monte Carlo", z <= 3.0,
                   f"A={A:.6f} MC={est:.6f} +- {se:.4f} ({z:.2f} SE, N={samples})")


# 6. graphs

def _origin_star(p):
    return stargraph.local_star(p, p.index_of((0.0, 0.0, 0.0)))


@_label(6, "kissing stars of fcc and hcp")
def check_kissing_stars():
    out = []
    for p in (packing.fcc_packing(6.0), packing.hcp_packing(6.0)):
        s = _origin_star(p)
        g = stargraph.star_graph(s)
        d = np.linalg.norm(s.u_set - s.center, axis=1)
        out.append((p.label, len(s.u_set), g.n, len(g.edges), len(g.faces), g.face_size_counts(),
                    float(np.abs(d - 2).max())))
    ok = all(u == 12 and n == 12 and e == 24 and f == 14 and fs == {3: 8, 4: 6} and dev <= 1e-12
             for _, u, n, e, f, fs, dev in out)
    detail = "; ".join(f"{lab}: |U|={u} V={n} E={e} F={f} faces={fs}" for lab, u, n, e, f, fs, _ in out)
    return _result(6, "kissing stars of fcc and hcp", ok, detail)


@_label(6, "reference graphs fcc/hcp/pent")
def check_reference_codes(references=None):
    refs = stargraph.load_references(references)
    codes = {kind: code for kind, (code, _, _) in refs.items()}
    distinct = len(set(codes.values())) == len(codes)
    fresh = {kind: stargraph.canonical_form(stargraph.star_graph(s))
             for kind, s in stargraph.reference_stars().items()}
    match = all(fresh[k] == codes[k] for k in codes)
    return _result(6, "reference graphs fcc/hcp/pent", distinct and match,
                   f"pairwise distinct={distinct}, stored codes reproduce={match}")


@_label(6, "every interior fcc star is G_fcc")
def check_fcc_classification(references=None):
    p = packing.fcc_packing(10.0)
    kinds = [stargraph.classify(stargraph.star_graph(stargraph.local_star(p, int(i))), references).kind
             for i in p.interior_indices]
    bad = sum(k != "FCC" for k in kinds)
    return _result(6, "every interior fcc star is G_fcc", kinds and bad == 0,
                   f"{len(kinds)} interior vertices, {bad} misclassified")


# 7. pentagonal star

@_label(7, "pentagonal star")
def check_pent_star():
    s = stargraph.pent_star()
    pts = s.u_set
    radial = float(np.abs(np.linalg.norm(pts, axis=1) - 2).max())
    gaps = min(np.linalg.norm(a - b) for a, b in itertools.combinations(pts, 2))
    z = np.round(pts[:, 2], 9)
    poles = int(np.sum(np.abs(np.abs(z) - 2) < 1e-9))
    rings = sorted(int(np.sum(np.abs(z - h) < 1e-9)) for h in set(z) if abs(abs(h) - 2) > 1e-9)
    ok = len(pts) == 12 and radial <= 1e-12 and gaps >= 2 - 1e-9 and poles == 2 and rings == [5, 5]
    return _result(7, "pentagonal star", ok,
                   f"12 points={len(pts) == 12}, max |r-2|={radial:.1e}, min gap={gaps:.12f}, "
                   f"poles={poles}, rings={rings}")


# 8. LP and branch and bound

@_label(8, "simplex vs vertex enumeration")
def check_simplex_random(count: int = 100, seed: int = 5):
    rng = np.random.default_rng(seed)
    worst = 0.0
    status_ok = True
    for _ in range(count):
        c, A, b, lo, hi = oracles.random_bounded_lp(rng)
        res = lp.simplex_max(lp.LinearProgram(c, A, b, lo, hi))
        ref = oracles.lp_vertex_enumeration(c, A, b, lo, hi)
        if res.status is lp.LPStatus.INFEASIBLE:
            status_ok &= ref == -math.inf
        else:
            status_ok &= res.status is lp.LPStatus.OPTIMAL and ref > -math.inf
            worst = max(worst, abs(res.value - ref))
    return _result(8, "simplex vs vertex enumeration", status_ok and worst <= 1e-8,
                   f"{count} random LPs, max |diff| = {worst:.2e}")


def _bnb_case(problem, target, grid_points):
    best, _ = oracles.grid_max(problem.objective, problem.lower, problem.upper, grid_points)
    out = lp.branch_and_bound(problem, target, max_nodes=10**6)
    if best < target:
        ok = (isinstance(out, lp.BoundCertificate) and out.verified
              and lp.audit_tiling(out, problem.lower, problem.upper)
              and lp.audit_soundness(out, problem.objective, 100))
    else:
        ok = isinstance(out, lp.Refuted) and problem.objective(out.point) >= target \
            and np.all(out.point >= problem.lower) and np.all(out.point <= problem.upper)
    return ok, f"{problem.name} target={target}: grid max {best:.6g} -> {type(out).__name__}"


@_label(8, "branch and bound toy problems")
def check_branch_and_bound():
    cases = [
        (lp.neg_sum_squares_problem(3), 0.5, 21),
        (lp.sum_sin_problem(2), 1.9, 201),
        (lp.sum_sin_problem(2), 2.1, 201),
    ]
    results = [_bnb_case(*c) for c in cases]
    return _result(8, "branch and bound toy problems", all(ok for ok, _ in results),
                   "; ".join(d for _, d in results))


@_label(8, "face-score demo on G_fcc")
def check_face_score_demo():
    g = stargraph.star_graph(stargraph.reference_stars()["FCC"])
    problem = lp.toy_face_score_problem(g)
    opt = lp.toy_optimum(g)  # closed form, one face at a time
    above = lp.branch_and_bound(problem, opt + 0.01)
    below = lp.branch_and_bound(problem, opt - 0.01)
    ok = (isinstance(above, lp.BoundCertificate) and above.verified
          and abs(above.global_bound - opt) <= 1e-6
          and lp.audit_tiling(above, problem.lower, problem.upper)
          and lp.audit_soundness(above, problem.objective, 100)
          and isinstance(below, lp.Refuted) and problem.objective(below.point) >= opt - 0.01)
    return _result(8, "face-score demo on G_fcc", ok,
                   f"toy optimum {opt:.10g}: target+0.01 -> {type(above).__name__}"
                   f"{f' (bound {above.global_bound:.10g})' if isinstance(above, lp.BoundCertificate) else ''}, "
                   f"target-0.01 -> {type(below).__name__}")


# 9. reproducibility

@_label(9, "manifest replay is byte-identical")
def check_cli_reproducible():
    from . import cli

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        pk = tmp / "fcc.json"
        codes = [cli.main(["generate", "--kind", "fcc", "--radius", "12", "--out", str(pk)])]
        outputs = {}
        for name, args in (
            ("density.csv", ["density", "--packing", str(pk), "--x", "0,0,0", "--radii", "5,8"]),
            ("graph.json", ["graph", "--packing", str(pk), "--vertex", "0"]),
        ):
            out = tmp / name
            if name == "graph.json":
                args[args.index("0")] = str(packing.load_packing(pk).index_of((0, 0, 0)))
            codes.append(cli.main(args + ["--out", str(out)]))
            first = out.read_bytes()
            out.unlink()
            codes.append(cli.main(["replay", "--manifest", str(out) + ".manifest.json"]))
            outputs[name] = first == out.read_bytes()
    return _result(9, "manifest replay is byte-identical", all(outputs.values()) and not any(codes),
                   ", ".join(f"{k}: {'identical' if v else 'DIFFERS'}" for k, v in outputs.items()))


ALL_CHECKS = (
    check_delta_tet, check_8pt, check_delta_oct, check_fcc_density,
    check_cell_volume_identity,
    check_lattice_cells, check_saturated_circumradius,
    check_density_law,
    check_covered_volume_mc,
    check_kissing_stars, check_reference_codes, check_fcc_classification,
    check_pent_star,
    check_simplex_random, check_branch_and_bound, check_face_score_demo,
    check_cli_reproducible,
)

NEEDS_REFERENCES = {check_reference_codes, check_fcc_classification}


def run_all(references=None, checks=ALL_CHECKS) -> list[CheckResult]:
    results = []
    for check in checks:
        try:
            res = check(references) if check in NEEDS_REFERENCES else check()
        except Exception as exc:  # a crashing check is a failing check
            res = CheckResult(check.criterion, check.label, False, f"error: {exc!r}")
        results.append(res)
    return results
