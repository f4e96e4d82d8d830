import numpy as np
import pytest

from curveforge.ff import make_field
from curveforge.poly import parse_form
from curveforge.quadform import (QuadraticFormError, bilinear, check_group_axioms, classify,
                                 level_set, orthogonal_group, orthogonal_group_block,
                                 orthogonal_group_naive, quadratic_relations, type_label)

F2, F3, F4 = make_field(2), make_field(3), make_field(2, 2)


def test_bilinear_examples():
    Q = parse_form("vw+x^2+xy+y^2", F2)
    for v in ([1, 0, 1, 1, 0], [1, 1, 1, 1, 1]):
        assert bilinear(Q, v, v) == 0
    Q2 = parse_form("x*y", F3)
    assert bilinear(Q2, [1, 0], [0, 1]) == 1


def _relation_sets(Q):
    out = {}
    for r in quadratic_relations(Q):
        out[r.monomial] = ({frozenset([u, v]) for c, u, v in r.terms if c == 1}, r.rhs)
    return out


def test_relations_for_two_hyperbolic_planes():
    Q = parse_form("x*y+z*w", F3)
    rel = _relation_sets(Q)
    assert len(rel) == 10

    def g(r, s):
        return (r - 1, s - 1)

    def pairs(i, j):
        if i == j:
            return {frozenset([g(1, i), g(2, i)]), frozenset([g(3, i), g(4, i)])}
        return {frozenset([g(1, i), g(2, j)]), frozenset([g(1, j), g(2, i)]),
                frozenset([g(3, i), g(4, j)]), frozenset([g(3, j), g(4, i)])}

    for i in range(1, 5):
        for j in range(i, 5):
            want_rhs = 1 if (i, j) in ((1, 2), (3, 4)) else 0
            assert rel[(i - 1, j - 1)] == (pairs(i, j), want_rhs)


def test_three_relations_for_binary_form():
    assert len(quadratic_relations(parse_form("x*y", F3))) == 3


def test_level_sets_of_cone_have_16_vectors():
    Q = parse_form("v*w+x^2", F2, 5)
    for c in (0, 1):
        assert len(level_set(Q, c)) == 16


def test_small_orthogonal_group():
    Q = parse_form("x*y", F3)
    G = orthogonal_group(Q)
    assert G.order == 4
    assert G.contains(np.array([[0, 1], [1, 0]]))
    assert G.contains(np.array([[2, 0], [0, 2]]))


@pytest.mark.parametrize("text,q,order", [
    ("vw+x^2+xy+y^2", 2, 1920),
    ("vw+xy+z^2", 2, 720),
])
def test_orders_over_f2(text, q, order):
    G = orthogonal_group(parse_form(text, F2))
    assert G.order == order == G.table_order()


def test_block_construction_matches_direct():
    Q = parse_form("v*w+x^2", F2, 5)
    direct = orthogonal_group(Q)
    block = orthogonal_group_block(Q)
    key = lambda G: {m.tobytes() for m in G.matrices.astype(np.int8)}
    assert key(direct) == key(block)
    assert check_group_axioms(block, sample=2000)


def test_block_with_full_support_is_plain():
    Q = parse_form("x*y+z^2", F3)
    assert orthogonal_group_block(Q).order == orthogonal_group(Q).order


def test_naive_oracle_small():
    Q = parse_form("x^2+y^2", F3)
    assert orthogonal_group(Q).order == orthogonal_group_naive(Q).order == 8


@pytest.mark.parametrize("text,ctx,label,count", [
    ("xy+z^2+w^2", F3, "nonsplit-rank-4", 10),
    ("xy+z^2+t*z*w+w^2", F4, "nonsplit-rank-4", 17),
    ("xy+zw", F3, "split-rank-4", 16),
    ("vw+xy+z^2", F2, "IV", 15),
    ("vw+x^2+xy+y^2", F2, "III", None),
])
def test_classify(text, ctx, label, count):
    T = classify(parse_form(text, ctx))
    assert T.label == label
    if count is not None:
        assert T.point_count == count
    if label == "IV":
        assert T.sing_dim == -1


def test_cone_labels():
    T = classify(parse_form("x*y+z^2", F3, 4))
    assert T.sing_dim == 0 and T.label == "rank-3"
    assert type_label(4, 3, 0, 999).startswith("unknown")


def test_rejects_bad_input():
    with pytest.raises(QuadraticFormError):
        classify(parse_form("x^3", F2, 3))
