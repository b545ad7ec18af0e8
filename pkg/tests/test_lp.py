import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from keplerkit import lp, oracles, stargraph
from keplerkit.lp import LinearProgram, LPStatus


def test_simple_max():
    prog = LinearProgram.from_rows([1, 1], [([1, 0], 1), ([0, 1], 1)], [(0, 2), (0, 2)])
    res = lp.simplex_max(prog)
    assert res.status is LPStatus.OPTIMAL
    assert res.value == pytest.approx(2.0, abs=1e-12)
    assert np.allclose(res.x, [1, 1])


def test_infeasible():
    res = lp.simplex_max(LinearProgram.from_rows([1], [([1], -1)], [(0, 1)]))
    assert res.status is LPStatus.INFEASIBLE


def test_unbounded():
    res = lp.simplex_max(LinearProgram([1, 0], [[0, 1]], [1], [0, 0], [np.inf, np.inf]))
    assert res.status is LPStatus.UNBOUNDED


def test_free_variables():
    # maximise -|x - 3| written as t <= x - 3, t <= 3 - x with free x, t
    prog = LinearProgram([0, 1], [[-1, 1], [1, 1]], [-3, 3], [-np.inf, -np.inf], [np.inf, np.inf])
    res = lp.simplex_max(prog)
    assert res.status is LPStatus.OPTIMAL and res.value == pytest.approx(0.0, abs=1e-12)
    assert res.x[0] == pytest.approx(3.0)


def test_bad_shapes():
    with pytest.raises(ValueError):
        LinearProgram([1, 1], [[1, 1]], [1, 2], [0, 0], [1, 1])
    with pytest.raises(ValueError):
        LinearProgram([1], [[1]], [1], [2], [1])


def test_degenerate_lp_terminates():
    # many constraints through the optimal vertex
    rows = [([1, 1, 1], 1)] * 21 + [([1, 0, 0], 1), ([0, 1, 0], 1), ([1, 1, 0], 1)]
    res = lp.simplex_max(LinearProgram.from_rows([1, 1, 1], rows, [(0, 1)] * 3))
    assert res.status is LPStatus.OPTIMAL and res.value == pytest.approx(1.0)


def test_random_lps_match_vertex_enumeration():
    rng = np.random.default_rng(5)
    for _ in range(100):
        c, A, b, lo, hi = oracles.random_bounded_lp(rng)
        res = lp.simplex_max(LinearProgram(c, A, b, lo, hi))
        ref = oracles.lp_vertex_enumeration(c, A, b, lo, hi)
        if ref == -math.inf:
            assert res.status is LPStatus.INFEASIBLE
        else:
            assert res.status is LPStatus.OPTIMAL
            assert abs(res.value - ref) <= 1e-8
            x = res.x
            assert np.all(A @ x <= b + 1e-9) and np.all(x >= lo - 1e-9) and np.all(x <= hi + 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_row_permutation_and_redundancy_invariance(seed):
    rng = np.random.default_rng(seed)
    c, A, b, lo, hi = oracles.random_bounded_lp(rng)
    base = lp.simplex_max(LinearProgram(c, A, b, lo, hi))
    perm = rng.permutation(len(b))
    shuffled = lp.simplex_max(LinearProgram(c, A[perm], b[perm], lo, hi))
    # a redundant row: a nonnegative combination of the rows, loosened by 1
    w = rng.uniform(0, 1, len(b))
    red_row = w @ A if len(b) else np.zeros(len(c))
    red_rhs = (w @ b if len(b) else 0.0) + 1.0
    padded = lp.simplex_max(LinearProgram(c, np.vstack([A, red_row]), np.append(b, red_rhs), lo, hi))
    assert base.status == shuffled.status == padded.status
    if base.status is LPStatus.OPTIMAL:
        assert abs(base.value - shuffled.value) <= 1e-9
        assert abs(base.value - padded.value) <= 1e-9


# branch and bound

def check_certificate(cert, problem):
    assert isinstance(cert, lp.BoundCertificate) and cert.verified
    assert lp.audit_tiling(cert, problem.lower, problem.upper)
    assert lp.audit_soundness(cert, problem.objective, samples=100)


def test_neg_sum_squares():
    prob = lp.neg_sum_squares_problem(3)
    best, _ = oracles.grid_max(prob.objective, prob.lower, prob.upper, 21)
    assert best == 0.0
    cert = lp.branch_and_bound(prob, 0.5, max_nodes=10**6)
    check_certificate(cert, prob)
    assert cert.global_bound < 0.5


def test_sum_sin_refuted():
    prob = lp.sum_sin_problem(2)
    best, _ = oracles.grid_max(prob.objective, prob.lower, prob.upper, 201)
    assert best == pytest.approx(2.0)
    out = lp.branch_and_bound(prob, 1.9, max_nodes=10**6)
    assert isinstance(out, lp.Refuted)
    assert prob.objective(out.point) == out.value >= 1.9
    assert np.all(out.point >= prob.lower) and np.all(out.point <= prob.upper)


@pytest.mark.parametrize("target", [2.1, 2.0001])
def test_sum_sin_certified(target):
    prob = lp.sum_sin_problem(2)
    cert = lp.branch_and_bound(prob, target, max_nodes=10**6)
    check_certificate(cert, prob)
    assert cert.global_bound == pytest.approx(2.0, abs=1e-9)


def _loose_square_problem(dim=2):
    # -x^2 on [-1, 2] without the peak tangent: the root relaxation bounds each
    # term by 0.5 (tangents at -1 and 0.5 meet at x = -0.25) against a true 0
    terms = [lp.ConcaveTerm(i, lambda x: -x * x, lambda x: -2.0 * x, None) for i in range(dim)]
    return lp.RelaxableProblem(np.full(dim, -1.0), np.full(dim, 2.0), lambda x: -float(np.sum(np.square(x))),
                               lp.separable_concave_relaxer(terms, dim), "loose_square")


def test_branching_tightens_a_loose_relaxation():
    prob = _loose_square_problem()
    root = lp.simplex_max(prob.relaxer(prob.lower, prob.upper))
    assert root.value == pytest.approx(1.0, abs=1e-12)
    cert = lp.branch_and_bound(prob, 0.1, max_nodes=10**6)
    check_certificate(cert, prob)
    assert len(cert.leaves) > 1 and cert.max_depth >= 2
    assert 0.0 <= cert.global_bound < 0.1
    d = cert.to_dict()
    assert d["verified"] and len(d["leaves"]) == len(cert.leaves)
    assert [leaf.lower for leaf in cert.leaves] == sorted(leaf.lower for leaf in cert.leaves)


def test_inconclusive_when_node_budget_runs_out():
    out = lp.branch_and_bound(_loose_square_problem(), 0.01, max_nodes=5)
    assert isinstance(out, lp.Inconclusive)
    assert out.node_count == 5 and out.open_boxes > 0


def test_tie_is_never_verified():
    prob = lp.neg_sum_squares_problem(2)
    out = lp.branch_and_bound(prob, 0.0, max_nodes=1000)
    assert not isinstance(out, lp.BoundCertificate)


def test_unsound_relaxer_is_caught():
    good = lp.neg_sum_squares_problem(2)

    def too_low(lo, hi):
        prog = good.relaxer(lo, hi)
        return LinearProgram(prog.c, prog.A, prog.b - 5.0, prog.lower, prog.upper)

    bad = lp.RelaxableProblem(good.lower, good.upper, good.objective, too_low, "unsound")
    with pytest.raises((lp.SoundnessViolation,)):
        lp.branch_and_bound(bad, 0.5)


def test_tiling_audit_detects_gaps_and_overlaps():
    leaf = lambda lo, hi: lp.Leaf(lo, hi, 0.0, 1)
    gap = lp.BoundCertificate(1.0, (leaf((0.0,), (0.4,)), leaf((0.5,), (1.0,))), 2, 1)
    overlap = lp.BoundCertificate(1.0, (leaf((0.0,), (0.6,)), leaf((0.4,), (1.0,)), leaf((0.9,), (1.0,))), 3, 1)
    ok = lp.BoundCertificate(1.0, (leaf((0.0,), (0.5,)), leaf((0.5,), (1.0,))), 2, 1)
    assert not lp.audit_tiling(gap, [0.0], [1.0])
    assert not lp.audit_tiling(overlap, [0.0], [1.0])
    assert lp.audit_tiling(ok, [0.0], [1.0])


def test_soundness_audit_detects_bad_leaf():
    cert = lp.BoundCertificate(1.0, (lp.Leaf((0.0,), (1.0,), 0.1, 0),), 1, 0)
    assert not lp.audit_soundness(cert, lambda x: float(x[0]))


# toy face score

@pytest.fixture(scope="module")
def ref_graphs():
    return {k: stargraph.star_graph(s) for k, s in stargraph.reference_stars().items()}


def test_toy_optimum_closed_form(ref_graphs):
    assert lp.toy_optimum(ref_graphs["FCC"]) == pytest.approx(8 / 3 + 6 / 4)
    assert lp.toy_optimum(ref_graphs["PENT"]) == pytest.approx(10 / 3 + 5 / 4)
    prob = lp.toy_face_score_problem(ref_graphs["FCC"])
    assert prob.objective(np.full(prob.dimension, lp.TOY_PEAK)) == pytest.approx(lp.toy_optimum(ref_graphs["FCC"]))
    assert prob.dimension == 24


@pytest.mark.parametrize("kind", ["FCC", "PENT"])
def test_face_demo_above_and_below(ref_graphs, kind):
    g = ref_graphs[kind]
    prob = lp.toy_face_score_problem(g)
    opt = lp.toy_optimum(g)
    cert = lp.face_score_demo(g, opt + 0.01)
    check_certificate(cert, prob)
    assert cert.global_bound == pytest.approx(opt, abs=1e-8)
    out = lp.face_score_demo(g, opt - 0.01)
    assert isinstance(out, lp.Refuted) and prob.objective(out.point) >= opt - 0.01


def test_face_demo_single_triangle():
    g = stargraph.cycle_graph(3)
    opt = 2 * lp.toy_face_optimum(3)  # the triangle bounds two faces
    cert = lp.face_score_demo(g, opt + 1e-3)
    check_certificate(cert, lp.toy_face_score_problem(g))
    assert abs(cert.global_bound - opt) <= 1e-8
