import math

import numpy as np
import pytest

from keplerkit import constants, packing, voronoi
from keplerkit.packing import PackingError
from keplerkit.voronoi import SQRT32, VertexFunction


@pytest.fixture(scope="module")
def fcc():
    return packing.fcc_packing(9.0)


@pytest.fixture(scope="module")
def hcp():
    return packing.hcp_packing(9.0)


@pytest.fixture(scope="module")
def cubic():
    return packing.cubic_packing(9.0)


@pytest.fixture(scope="module")
def rand():
    return packing.random_saturated_packing(10.0, seed=3)


def test_fcc_cell_is_rhombic_dodecahedron(fcc):
    rec = voronoi.voronoi_cell(fcc, fcc.index_of((0, 0, 0)))
    assert abs(rec.volume - SQRT32) <= 1e-9
    assert rec.face_count == 12 and len(rec.cell.vertices) == 14
    assert rec.circumradius == pytest.approx(math.sqrt(2), abs=1e-12)


def test_hcp_cell_is_trapezo_rhombic(hcp):
    rec = voronoi.voronoi_cell(hcp, hcp.index_of((0, 0, 0)))
    assert abs(rec.volume - SQRT32) <= 1e-9
    assert rec.face_count == 12
    # six rhombi and six trapezoids
    sizes = sorted(len(f) for f in rec.cell.faces)
    assert sizes == [4] * 12


def test_cubic_cell_is_a_cube(cubic):
    rec = voronoi.voronoi_cell(cubic, cubic.index_of((0, 0, 0)))
    assert rec.volume == pytest.approx(8.0, abs=1e-12)
    assert rec.face_count == 6
    assert rec.circumradius == pytest.approx(math.sqrt(3), abs=1e-12)


@pytest.mark.parametrize("name", ["fcc", "hcp"])
def test_all_lattice_cells_congruent(name, request):
    p = request.getfixturevalue(name)
    vols = np.array([rec.volume for rec in voronoi.interior_cells(p)])
    assert len(vols) > 50
    assert np.all(np.abs(vols - SQRT32) <= 1e-9)


def test_boundary_vertex_rejected(fcc):
    outer = int(np.argmax(np.linalg.norm(fcc.centers, axis=1)))
    with pytest.raises(PackingError):
        voronoi.voronoi_cell(fcc, outer)


def test_saturated_cells_lie_in_radius_2(rand):
    cells = voronoi.interior_cells(rand)
    assert len(cells) > 50
    assert max(rec.circumradius for rec in cells) <= 2 + 1e-9


def test_cells_contain_their_vertex_and_tile(rand):
    cells = voronoi.interior_cells(rand)
    for rec in cells[:20]:
        assert rec.cell.contains(rec.vertex)
    # cells are disjoint and lie within 2 of their centres
    total = sum(rec.volume for rec in cells)
    reach = max(np.linalg.norm(rec.vertex - rand.window_center) for rec in cells) + 2
    assert total <= 4 * math.pi / 3 * reach**3


def test_cell_volumes_are_thread_count_independent(monkeypatch):
    p = packing.random_saturated_packing(8.0, seed=9)
    monkeypatch.setenv("KEPLERKIT_THREADS", "1")
    one = [rec.volume for rec in voronoi.interior_cells(p)]
    q = packing.Packing(p.centers, p.window_center, p.window_radius)
    monkeypatch.setenv("KEPLERKIT_THREADS", "4")
    four = [rec.volume for rec in voronoi.interior_cells(q)]
    assert one == four


def test_thread_count_validation(monkeypatch):
    monkeypatch.setenv("KEPLERKIT_THREADS", "0")
    with pytest.raises(ValueError):
        voronoi.thread_count()
    monkeypatch.delenv("KEPLERKIT_THREADS")
    assert voronoi.thread_count() >= 1


# vertex functions

def test_fcc_zero_function_has_zero_margins(fcc):
    margins = voronoi.fcc_compatibility_check(fcc, VertexFunction.constant(fcc, 0.0))
    assert all(abs(m) <= 1e-9 for _, m in margins)
    assert voronoi.is_fcc_compatible(margins)


def test_cubic_margins(cubic):
    margins = voronoi.fcc_compatibility_check(cubic, VertexFunction.constant(cubic, 0.0))
    assert all(m == pytest.approx(8 - SQRT32, abs=1e-9) for _, m in margins)
    assert 8 - SQRT32 == pytest.approx(2.343146, abs=1e-6)


def test_deficit_function_is_compatible(rand):
    margins = voronoi.fcc_compatibility_check(rand, voronoi.deficit_function(rand))
    assert voronoi.is_fcc_compatible(margins)
    assert all(m >= 0 for _, m in margins)


def test_zero_function_on_random_packing_can_fail(rand):
    margins = voronoi.fcc_compatibility_check(rand, VertexFunction.constant(rand, 0.0))
    vols = [rec.volume for rec in voronoi.interior_cells(rand)]
    assert voronoi.is_fcc_compatible(margins) == (min(vols) >= SQRT32 - 1e-9)


def test_missing_values_rejected(fcc):
    with pytest.raises(KeyError):
        voronoi.fcc_compatibility_check(fcc, VertexFunction({}, "empty"))


def test_negligibility_of_zero(fcc):
    fit = voronoi.negligibility_fit(fcc, VertexFunction.constant(fcc, 0.0), (0, 0, 0), [1, 2, 3, 4])
    assert fit.sums == (0.0, 0.0, 0.0, 0.0) and fit.fitted_C1 == 0.0
    assert fit.passes and not fit.growing


def test_constant_one_is_not_negligible():
    p = packing.fcc_packing(16.0)
    radii = [4, 6, 8, 10, 12]
    fit = voronoi.negligibility_fit(p, VertexFunction.constant(p, 1.0), (0, 0, 0), radii)
    counts = [len(p.neighbors((0, 0, 0), r)) for r in radii]
    assert list(fit.sums) == counts
    per_r2 = [s / r**2 for r, s in zip(radii, fit.sums)]
    assert all(b > a for a, b in zip(per_r2, per_r2[1:]))  # C1 grows with r
    assert fit.growth_exponent == pytest.approx(3.0, abs=0.3)
    assert fit.growing


def test_negligibility_radius_checked(fcc):
    with pytest.raises(PackingError):
        voronoi.negligibility_fit(fcc, VertexFunction.constant(fcc, 0.0), (0, 0, 0), [6.0])


def test_score_identity_function_on_fcc(fcc):
    sigma = VertexFunction.constant(fcc, 8 * constants.pt())
    a = voronoi.lemma4_function(fcc, sigma)
    assert all(abs(a[i]) <= 1e-9 for i in fcc.interior_indices)


def test_score_identity_margins_vanish_anywhere(rand):
    sigma = VertexFunction.constant(rand, 8 * constants.pt())
    margins = voronoi.fcc_compatibility_check(rand, voronoi.lemma4_function(rand, sigma))
    assert all(abs(m) <= 1e-9 for _, m in margins)


def test_lower_score_gives_positive_margin(rand):
    idx = [int(i) for i in rand.interior_indices]
    values = {i: 8 * constants.pt() for i in idx}
    values[idx[0]] -= 0.1
    margins = dict(voronoi.fcc_compatibility_check(rand, voronoi.lemma4_function(rand, VertexFunction(values, "s"))))
    assert margins[idx[0]] > 0
    assert margins[idx[0]] == pytest.approx(0.1 / (4 * constants.delta_oct()), abs=1e-9)
    assert all(abs(margins[i]) <= 1e-9 for i in idx[1:])
