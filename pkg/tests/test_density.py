import math

import numpy as np
import pytest

from keplerkit import constants, density, oracles, packing, voronoi
from keplerkit.packing import Packing, PackingError
from keplerkit.voronoi import VertexFunction

RHO = constants.fcc_density()


@pytest.fixture(scope="module")
def fcc_big():
    return packing.fcc_packing(51.0)


@pytest.fixture(scope="module")
def rand12():
    return packing.random_saturated_packing(12.0, seed=3)


def single(R=5.0):
    return Packing([[0, 0, 0]], (0, 0, 0), R)


def test_single_ball():
    assert density.covered_volume(single(), (0, 0, 0), 1.0) == pytest.approx(4 * math.pi / 3, abs=1e-12)
    assert density.covered_volume(single(), (0, 0, 0), 0.5) == pytest.approx(math.pi / 6, abs=1e-12)
    assert density.finite_density(single(), (0, 0, 0), 1.0).delta == pytest.approx(1.0, abs=1e-12)


def test_empty_packing():
    rep = density.finite_density(packing.empty_packing(5.0), (0, 0, 0), 2.0)
    assert rep.A == 0.0 and rep.delta == 0.0 and rep.ball_count == 0


def test_window_too_small():
    with pytest.raises(PackingError):
        density.covered_volume(packing.fcc_packing(10.0), (0, 0, 0), 9.5)
    with pytest.raises(ValueError):
        density.covered_volume(packing.fcc_packing(10.0), (0, 0, 0), 0.0)


def test_covered_volume_monte_carlo():
    p = packing.fcc_packing(11.0)
    A = density.covered_volume(p, (0, 0, 0), 10.0)
    est, se = oracles.mc_union_volume(p.centers, (0, 0, 0), 10.0, 10**7, seed=7)
    assert abs(A - est) <= 3 * se


def test_covered_volume_off_lattice_point_monte_carlo():
    p = packing.random_saturated_packing(8.0, seed=2)
    x = (0.3, -0.7, 0.2)
    A = density.covered_volume(p, x, 5.0)
    est, se = oracles.mc_union_volume(p.centers, x, 5.0, 2 * 10**6, seed=8)
    assert abs(A - est) <= 3 * se


def test_additive_over_disjoint_subpackings():
    p = packing.random_saturated_packing(8.0, seed=5)
    x = (0.1, 0.2, 0.3)
    half = p.centers[:, 0] < 0.5
    a = Packing(p.centers[half], p.window_center, p.window_radius)
    b = Packing(p.centers[~half], p.window_center, p.window_radius)
    whole = density.covered_volume(p, x, 6.0)
    assert whole == pytest.approx(density.covered_volume(a, x, 6.0) + density.covered_volume(b, x, 6.0), rel=1e-12)


def test_monotone_in_r():
    p = packing.fcc_packing(12.0)
    vals = [density.covered_volume(p, (0.1, 0.0, 0.0), r) for r in np.linspace(0.5, 10.5, 41)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_fcc_density_at_50(fcc_big):
    rep = density.finite_density(fcc_big, (0, 0, 0), 50.0)
    assert abs(rep.delta - RHO) <= 0.05
    assert rep.count_bound_holds


def test_lemma_bound_on_fcc(fcc_big):
    checks = density.lemma_bound_check(fcc_big, (0, 0, 0), [5, 10, 20, 40, 50], C1=0.0)
    assert all(c.satisfied for c in checks)
    assert all(c.count_bound_holds for c in checks)
    assert all(c.A <= c.ball_count * 4 * math.pi / 3 for c in checks)
    # |r (delta - rho)| does not grow across the scan
    running = np.maximum.accumulate([abs(c.scaled_excess) for c in checks])
    assert running[-1] <= 1.5 * running[0]
    assert len({c.fitted_C for c in checks}) == 1
    assert checks[0].fitted_C == max(c.scaled_excess for c in checks)


def test_lemma_bound_shape():
    assert density.lemma_bound(40, 0.0) - density.lemma_bound(80, 0.0) > 0
    assert density.lemma_bound(1e7, 0.0) == pytest.approx(RHO, rel=1e-5)
    assert density.lemma_bound(10, 2.0) > density.lemma_bound(10, 0.0)


def test_lemma_bound_checks_windows_first():
    with pytest.raises(PackingError):
        density.lemma_bound_check(packing.fcc_packing(12.0), (0, 0, 0), [5, 20])


def test_random_packing_reports_satisfy_inequality_1(rand12):
    p = rand12
    for r in (2.0, 5.0, 8.0, 10.0):
        assert density.finite_density(p, (0.5, 0.5, 0.5), r).count_bound_holds


def test_inequality2_chain_on_fcc():
    p = packing.fcc_packing(11.0)
    audit = density.inequality2_audit(p, VertexFunction.constant(p, 0.0), (0, 0, 0), 6.0, C1=0.0)
    assert audit.left == pytest.approx(audit.middle, rel=1e-12)
    assert audit.middle <= 4 * math.pi / 3 * 9**3
    assert audit.holds


def test_inequality2_chain_on_cubic():
    p = packing.cubic_packing(11.0)
    audit = density.inequality2_audit(p, VertexFunction.constant(p, 0.0), (0, 0, 0), 6.0, C1=0.0)
    assert audit.left < audit.middle
    assert audit.holds


def test_inequality2_with_deficit_on_random_packing(rand12):
    p = rand12
    a = voronoi.deficit_function(p)
    audit = density.inequality2_audit(p, a, (0, 0, 0), 6.0)
    assert audit.left_le_middle and audit.middle_le_right and audit.right_le_final
    assert audit.C1 >= 0


def test_inequality2_needs_interior_window():
    p = packing.fcc_packing(9.0)
    with pytest.raises(PackingError):
        density.inequality2_audit(p, VertexFunction.constant(p, 0.0), (0, 0, 0), 6.0)
