import numpy as np
import pytest
from hypothesis import given, strategies as st

from curveforge.ff import make_field
from curveforge.geometry import points_on_array
from curveforge.linalg import MatrixFq
from curveforge.poly import (Form, ParseError, UniPoly, deserialize, dot, eval_vector, evaluate,
                             evaluate_many, monomial_index, monomials, num_monomials, parse_form,
                             parse_unipoly, partials, reduce_cubic_canonical, substitute_linear,
                             uni_derivative, uni_gcd)

F2, F3, F4 = make_field(2), make_field(3), make_field(2, 2)


def test_monomial_order_and_count():
    assert num_monomials(4, 3) == 20
    mons = monomials(4, 3)
    assert mons[0] == (3, 0, 0, 0)
    assert mons[-1] == (0, 0, 0, 3)
    assert len(set(mons)) == 20
    assert monomial_index(4, 3)[(3, 0, 0, 0)] == 0


def test_eval_vector_at_first_coordinate_point():
    v = eval_vector([1, 0, 0, 0], 4, 3, F2)
    assert v.tolist() == [1] + [0] * 19


def test_evaluate_examples():
    x3 = parse_form("x^3", F3, 4)
    assert evaluate(x3, [1, 0, 0, 0]) == 1
    Q = parse_form("xy+z^2+t*z*w+w^2", F4)
    assert evaluate(Q, [1, 0, 0, 0]) == 0
    serre = parse_form("y^3*z - y*z^3 - x^4 + x^2*z^2", F3)
    assert evaluate(serre, [0, 1, 1]) == 0


def test_evaluate_in_extension():
    F16 = make_field(2, 4)
    Q = parse_form("xy+z^2+t*z*w+w^2", F4)
    pts = points_on_array([Q], F16)
    assert not evaluate_many(Q, pts, F16).any()


def test_partials():
    z2 = parse_form("z^2", F2, 4)
    assert all(P.is_zero() for P in partials(z2))
    Q = parse_form("xy+z^2+w^2", F3)
    assert partials(Q)[0] == parse_form("y", F3, 4)


def test_form_arithmetic():
    x, y = Form.variable(F3, 3, 0), Form.variable(F3, 3, 1)
    assert (x + y) * (x - y) == parse_form("x^2 - y^2", F3, 3)
    assert (-x).scale(2) == x
    assert parse_form("2x^2+y^2", F3, 3).normalized() == parse_form("x^2+2y^2", F3, 3)


def test_serialize_roundtrip():
    F = parse_form("x^3 + t*y^2*z + (t+1)*w^3", F4)
    assert deserialize(F.serialize()) == F
    assert parse_form(str(F), F4) == F


@pytest.mark.parametrize("text", ["x^2 + y", "", "x ^", "x*(y", "q^2"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_form(text, F3)


def test_cubic_reduction():
    Q = parse_form("xy+z^2+t*z*w+w^2", F4)
    F = parse_form("x^3", F4, 4) + Form.variable(F4, 4, 0) * Q
    R = reduce_cubic_canonical(F, Q)
    for m in ((2, 1, 0, 0), (1, 2, 0, 0), (0, 0, 3, 0), (0, 0, 0, 3)):
        assert R.coefficient(m) == 0
    assert R.coefficient((3, 0, 0, 0)) == 1
    assert reduce_cubic_canonical(R, Q) == R
    # R agrees with a constant multiple of F on the quadric
    F16 = make_field(2, 4)
    pts = points_on_array([Q], F16)
    a, b = evaluate_many(F, pts, F16), evaluate_many(R, pts, F16)
    nz = a != 0
    ratios = {int(F16.mul_table[b[i], F16.inv_table[a[i]]]) for i in np.nonzero(nz)[0]}
    assert len(ratios) == 1 and not b[~nz].any()


def test_substitution_matches_evaluation():
    rng = np.random.default_rng(3)
    F = Form(F3, 3, 3, tuple(rng.integers(0, 3, 10).tolist()))
    g = MatrixFq(F3, [[1, 1, 0], [0, 2, 1], [1, 0, 1]])
    G = substitute_linear(F, g)
    for P in rng.integers(0, 3, size=(20, 3)):
        assert evaluate(G, P.tolist()) == evaluate(F, g.apply(P).tolist())


def test_unipoly_gcd_and_derivative():
    P = parse_unipoly("x^2 - 1", F3)
    assert uni_gcd(P, parse_unipoly("x - 1", F3)) == parse_unipoly("x + 2", F3)
    assert uni_derivative(parse_unipoly("x^9", F3)).is_zero()
    g = 2
    H = parse_unipoly(f"x^{2 * g - 1}*(x^3 - x) + 1", F3)
    assert uni_gcd(H, uni_derivative(H)).degree == 0


def test_unipoly_division():
    A = parse_unipoly("x^5 + t*x + 1", F4)
    B = parse_unipoly("x^2 + t", F4)
    q, r = A.divmod(B)
    assert q * B + r == A and r.degree < 2


@given(st.lists(st.integers(0, 3), min_size=10, max_size=10), st.lists(st.integers(0, 3), min_size=3, max_size=3))
def test_dot_is_evaluate(coeffs, P):
    F = Form(F4, 3, 3, tuple(coeffs))
    assert dot(F4, np.array(coeffs), eval_vector(P, 3, 3, F4)) == evaluate(F, P)
