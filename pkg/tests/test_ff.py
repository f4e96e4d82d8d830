import numpy as np
import pytest

from curveforge.ff import (FieldError, embed, embedding, field_of_size, frobenius, frobenius_array,
                           least_irreducible, make_field, subfield_indices)


def test_f4_modulus_and_product():
    F4 = make_field(2, 2)
    assert F4.modulus == (1, 1, 1)
    t = F4.parse("t")
    assert F4.mul(t, F4.parse("t+1")) == 1


def test_f3_table():
    F3 = make_field(3)
    assert F3.mul(2, 2) == 1
    assert F3.inv(2) == 2


def test_f9_units_have_order_dividing_8():
    F9 = make_field(3, 2)
    assert all(F9.power(a, 8) == 1 for a in range(1, 9))


def test_f9_generator_inverse_is_seventh_power():
    F9 = make_field(3, 2)
    g = F9.generator
    brute = next(b for b in range(1, 9) if F9.mul(g, b) == 1)
    assert F9.inv(g) == brute == F9.power(g, 7)


def test_contexts_are_interned():
    assert make_field(2, 3) is make_field(2, 3)
    assert make_field(3) is make_field(3, 1) is field_of_size(3)
    assert field_of_size(9) is make_field(3, 2)


@pytest.mark.parametrize("p,k", [(5, 1), (4, 1), (2, 13), (3, 8)])
def test_unsupported_fields(p, k):
    with pytest.raises(FieldError):
        make_field(p, k)


def test_least_irreducible_has_no_roots_or_factors():
    assert least_irreducible(2, 4) == (1, 1, 0, 0, 1)
    assert least_irreducible(3, 2) == (1, 0, 1)


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        make_field(2, 2).inv(0)


def test_element_wrapper():
    F4 = make_field(2, 2)
    t = F4.element(F4.parse("t"))
    assert (t * t) == t + F4.one
    assert t ** -1 == t + F4.one
    with pytest.raises(FieldError):
        _ = t + make_field(2, 4).one


def test_format_parse_roundtrip():
    for ctx in (make_field(2, 2), make_field(3, 2), make_field(2, 4), make_field(3)):
        for a in range(ctx.q):
            assert ctx.parse(ctx.format(a)) == a
    F9 = make_field(3, 2)
    assert F9.parse("(1,2)") == F9.parse("2*t+1")


def test_embedding_one_and_t():
    F4, F16 = make_field(2, 2), make_field(2, 4)
    emb = embedding(F4, F16)
    assert emb[1] == 1
    roots = [x for x in range(16) if F16.add(F16.add(F16.mul(x, x), x), 1) == 0]
    assert emb[F4.parse("t")] == min(roots)


def test_embedding_is_multiplicative_f3_to_f27():
    F3, F27 = make_field(3), make_field(3, 3)
    emb = embedding(F3, F27)
    for a in range(3):
        for b in range(3):
            assert emb[F3.mul(a, b)] == F27.mul(emb[a], emb[b])
            assert emb[F3.add(a, b)] == F27.add(emb[a], emb[b])


def test_embedding_f4_f64_is_homomorphism():
    F4, F64 = make_field(2, 2), make_field(2, 6)
    emb = embedding(F4, F64)
    a, b = np.meshgrid(np.arange(4), np.arange(4))
    assert np.array_equal(emb[F4.mul_table[a, b]], F64.mul_table[emb[a], emb[b]])
    assert np.array_equal(emb[F4.add_table[a, b]], F64.add_table[emb[a], emb[b]])


def test_bad_embedding():
    with pytest.raises(FieldError):
        embedding(make_field(2, 2), make_field(2, 3))
    with pytest.raises(FieldError):
        embed(1, make_field(2, 4))


def test_frobenius_fixes_subfield():
    F4, F16 = make_field(2, 2), make_field(2, 4)
    sub = subfield_indices(F16, F4)
    fr = frobenius_array(F16, 4)
    assert np.array_equal(fr[sub], sub)
    assert np.array_equal(fr[fr], np.arange(16))
    a = F16.element(7)
    assert frobenius(frobenius(a, 4), 4) == a
