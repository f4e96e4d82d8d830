import pytest

from curveforge.ff import make_field
from curveforge.gallery import record
from curveforge.geometry import (HyperellipticError, HyperellipticModel, count_points, even_family,
                                 galois_orbit_reps, gonality_point_bound, hyperelliptic_count,
                                 hyperelliptic_family, hyperelliptic_smooth, normalize,
                                 num_projective_points, odd_family, plane_singular_scan,
                                 points_on_array, projective_points, serre_nq1, ternary_family,
                                 weil_interval)
from curveforge.poly import evaluate, parse_form

F2, F3, F4, F16 = make_field(2), make_field(3), make_field(2, 2), make_field(2, 4)


@pytest.mark.parametrize("n,ctx,count", [(1, F2, 3), (3, F4, 85), (4, F3, 121)])
def test_projective_points(n, ctx, count):
    pts = projective_points(n, ctx)
    assert len(pts) == count == num_projective_points(n, ctx.q)
    assert len({tuple(p) for p in pts.tolist()}) == count
    for p in pts.tolist()[:20]:
        assert tuple(p) == normalize(ctx, p)


def test_quadric_counts():
    assert count_points([parse_form("xy+z^2+w^2", F3)]) == 10
    Q = parse_form("xy+z^2+t*z*w+w^2", F4)
    assert count_points([Q]) == 17
    assert count_points([Q], F16) == 17 + 272


def test_galois_orbit_representatives():
    Q = parse_form("xy+z^2+t*z*w+w^2", F4)
    pts = points_on_array([Q], F16)
    reps = galois_orbit_reps(pts, 4, F16)
    assert len(reps) == 153
    rational = points_on_array([Q], F4)
    assert len(galois_orbit_reps(rational, 4, F4)) == 17


def test_points_satisfy_equations():
    F = record("serre-quartic-f3").forms()[0]
    pts = points_on_array([F])
    assert len(pts) == 10
    assert all(evaluate(F, p) == 0 for p in pts.tolist())


def test_ternary_family_smoothness():
    assert hyperelliptic_smooth(ternary_family(2))
    with pytest.raises(HyperellipticError):
        ternary_family(7)
    P = "x^13*(x^3 - x) + 1"
    assert not hyperelliptic_smooth(HyperellipticModel.from_strings(F3, P, g=7))


def test_genus_two_model_over_f4():
    M = HyperellipticModel.from_strings(F4, "x^5 + x^2", "x^3 + t + 1", g=2)
    assert hyperelliptic_smooth(M)
    assert hyperelliptic_count(M) == 10


def test_family_counts():
    assert hyperelliptic_count(odd_family(3, 4)) == 8
    assert hyperelliptic_count(even_family(4, 3)) == 10
    assert hyperelliptic_count(hyperelliptic_family(3, 5)) == 8
    assert hyperelliptic_count(hyperelliptic_family(4, 3)) == 10


def test_singular_model_count():
    M = HyperellipticModel.from_strings(F2, "x^3 + 1")
    assert not hyperelliptic_smooth(M)
    assert hyperelliptic_count(M, check_smooth=False) == 3
    with pytest.raises(HyperellipticError):
        hyperelliptic_count(M)


def test_family_range_fallback():
    # g = 7 is outside the ternary variant; the odd family covers it
    M = hyperelliptic_family(3, 7)
    assert M.P.degree == 16 and hyperelliptic_smooth(M)


def test_cuspidal_quintic():
    F = record("trigonal-quintic-f3").forms()[0]
    sing = plane_singular_scan(F)
    assert len(sing) == 1
    s = sing[0]
    assert s.point.coords == (0, 0, 1) and s.multiplicity == 2 and s.shape == "double-line"


def test_nodal_cubic():
    sing = plane_singular_scan(parse_form("x*y*z + x^3 + y^3", F3))
    assert [(s.point.coords, s.shape) for s in sing] == [((0, 0, 1), "two-lines")]


def test_smooth_quartic_has_no_singular_points():
    assert plane_singular_scan(record("serre-quartic-f3").forms()[0], 4) == []


def test_bounds():
    assert gonality_point_bound(2, 3) == 8
    assert serre_nq1(3) == 7 and serre_nq1(4) == 9
    assert weil_interval(4, 1) == (1, 9)
    with pytest.raises(ValueError):
        gonality_point_bound(0, 3)
    with pytest.raises(ValueError):
        serre_nq1(6)
