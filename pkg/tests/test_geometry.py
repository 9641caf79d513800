import math

import numpy as np
import pytest

from cp3body import (
    AtomConfig,
    DegenerateGeometry,
    Static,
    TriangleGeometry,
    Window,
    classify_region,
    positions_from_distances,
    triangle_from_points,
    triangle_from_positions,
)
from conftest import config_from_sides, random_rotation

M = Static(1.0)


def test_equilateral_sides():
    g = triangle_from_points([0, 0, 0], [1, 0, 0], [0.5, math.sqrt(3) / 2, 0])
    assert g.alpha == pytest.approx(1.0, abs=1e-14)
    assert g.beta == pytest.approx(1.0, abs=1e-14)
    assert g.gamma == pytest.approx(1.0, abs=1e-14)
    assert not g.collinear


def test_3_4_5_triangle():
    g = triangle_from_points([0, 0, 0], [3, 0, 0], [3, 4, 0])
    assert g.gamma == pytest.approx(3.0)
    assert g.alpha == pytest.approx(4.0)
    assert g.beta == pytest.approx(5.0)


def test_coincident_atoms_rejected():
    with pytest.raises(DegenerateGeometry):
        AtomConfig([0, 0, 0], [0, 0, 0], [1, 0, 0], M, M, M)
    with pytest.raises(DegenerateGeometry):
        triangle_from_points([0, 0, 0], [1e-12, 0, 0], [1, 0, 0])


def test_unit_vector_orientation():
    # n_ab = (r_A - r_B) / gamma and cyclic
    g = triangle_from_points([0, 0, 0], [2, 0, 0], [0, 3, 0])
    assert np.allclose(g.n_ab, [-1, 0, 0])
    assert np.allclose(g.n_ac, [0, -1, 0])
    assert np.allclose(g.n_bc, (np.array([2, -3, 0])) / math.sqrt(13))
    for v in (g.n_ab, g.n_ac, g.n_bc):
        assert abs(np.linalg.norm(v) - 1.0) < 1e-12


def test_translation_rotation_invariance(rng):
    pts = rng.normal(size=(3, 3)) * 2
    g0 = triangle_from_points(*pts)
    for _ in range(5):
        q = random_rotation(rng)
        shift = rng.normal(size=3) * 10
        moved = [q @ p + shift for p in pts]
        g1 = triangle_from_points(*moved)
        for a, b in ((g0.alpha, g1.alpha), (g0.beta, g1.beta), (g0.gamma, g1.gamma)):
            assert abs(a - b) <= 1e-12 * max(abs(a), 1.0)


def test_relabeling_permutes_sides(rng):
    pts = rng.normal(size=(3, 3)) * 2
    g = triangle_from_points(*pts)
    swapped = triangle_from_points(pts[1], pts[0], pts[2])  # A <-> B
    assert swapped.alpha == pytest.approx(g.beta)
    assert swapped.beta == pytest.approx(g.alpha)
    assert swapped.gamma == pytest.approx(g.gamma)


def test_collinear_flagged_and_accepted():
    g = triangle_from_points([0, 0, 0], [2, 0, 0], [1, 0, 0])
    assert g.collinear
    assert g.alpha == pytest.approx(1.0) and g.beta == pytest.approx(1.0)


def test_positions_from_distances_roundtrip():
    ra, rb, rc = positions_from_distances(4.0, 5.0, 3.0)
    g = triangle_from_points(ra, rb, rc)
    assert (g.alpha, g.beta, g.gamma) == pytest.approx((4.0, 5.0, 3.0))


def test_positions_from_distances_impossible():
    # documented acceptance-input defect: alpha=beta=1, gamma=3 admits no embedding
    with pytest.raises(DegenerateGeometry):
        positions_from_distances(1.0, 1.0, 3.0)


def _hand_geometry(alpha, beta, gamma):
    # classification uses only side lengths, so placeholder axes suffice
    return TriangleGeometry(alpha=alpha, beta=beta, gamma=gamma,
                            n_bc=[1, 0, 0], n_ac=[0, 1, 0], n_ab=[0, 0, 1])


def test_classify_window_configuration():
    # alpha=beta=1, gamma=3 is not embeddable; classification still works
    region = classify_region(_hand_geometry(1.0, 1.0, 3.0), 2.0)
    assert region.c_sees_a and region.c_sees_b and not region.a_sees_b


def test_classify_pair_configuration():
    cfg = config_from_sides(5.0, 5.0, 1.0)
    region = classify_region(triangle_from_positions(cfg), 2.0)
    assert not region.c_sees_a and not region.c_sees_b and region.a_sees_b
    assert region.window_alpha is Window.ABOVE  # 5 > 1 + 2
    assert region.window_beta is Window.ABOVE


def test_classify_zero_time(rng):
    for _ in range(5):
        pts = rng.normal(size=(3, 3))
        region = classify_region(triangle_from_points(*pts), 0.0)
        assert not (region.c_sees_a or region.c_sees_b or region.a_sees_b)
        assert region.fully_spacelike


def test_classify_negative_time_rejected():
    with pytest.raises(ValueError):
        classify_region(_hand_geometry(1, 1, 1), -0.5)


def test_classify_monotone_in_ct(rng):
    for _ in range(10):
        g = triangle_from_points(*rng.normal(size=(3, 3)))
        state = (False, False, False)
        for ct in np.linspace(0, 3 * g.max_side, 40):
            r = classify_region(g, ct)
            new = (r.c_sees_a, r.c_sees_b, r.a_sees_b)
            assert all(o <= n for o, n in zip(state, new))
            state = new


def test_classify_at_edge_flagged():
    g = _hand_geometry(1.0, 1.0, 3.0)
    r = classify_region(g, 1.0)
    assert "ct-beta" in r.at_edges and "ct-alpha" in r.at_edges
    assert not r.c_sees_a and not r.c_sees_b  # strict crossings only
    r2 = classify_region(_hand_geometry(3.0, 1.0, 2.0), 1.0)
    assert r2.window_alpha is Window.AT  # 3 == 2 + 1


def test_margins_consistent():
    g = _hand_geometry(2.0, 3.0, 4.0)
    r = classify_region(g, 2.5)
    assert r.ct_minus_alpha == pytest.approx(0.5)
    assert r.ct_minus_beta == pytest.approx(-0.5)
    assert r.ct_minus_gamma == pytest.approx(-1.5)
    assert r.cone_margin_alpha == pytest.approx(4 + 2.5 - 2)
    assert r.cone_margin_beta == pytest.approx(4 + 2.5 - 3)
    assert r.c_sees_b and not r.c_sees_a
    assert "1" in r.label and "below" in r.label


def test_classify_infinite_time():
    r = classify_region(_hand_geometry(2.0, 3.0, 4.0), math.inf)
    assert r.c_sees_a and r.c_sees_b and r.a_sees_b
    assert r.window_alpha is Window.BELOW
