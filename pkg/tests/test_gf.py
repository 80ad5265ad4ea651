import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nbpas.gf import PRIMITIVE_POLYS, Field, field_new, field_of_order
from oracles import poly_mulmod


def test_gf2():
    F = field_new(1)
    assert F.q == 2
    assert list(F.exp_table) == [1]


def test_gf4_hand_values():
    F = field_new(2)
    assert F.primitive_poly == 0b111
    assert F.mul(2, 2) == 3
    assert F.inv(2) == 3
    assert F.add(2, 3) == 1
    assert F.add(1, 1) == 0


def test_gf64_order():
    assert field_new(6).q == 64
    assert field_of_order(256).p == 8
    with pytest.raises(ValueError):
        field_of_order(48)


@pytest.mark.parametrize("p", [1, 2, 3, 4, 6, 8])
def test_tables_match_polynomial_arithmetic(p):
    F = field_new(p)
    a = np.arange(F.q)
    oracle = np.array([[poly_mulmod(int(x), int(y), F.primitive_poly, p) for y in a] for x in a])
    assert np.array_equal(F.mul_table, oracle)


@pytest.mark.parametrize("p", [1, 2, 3, 4, 6, 8])
def test_exp_log_inverse(p):
    F = field_new(p)
    i = np.arange(F.q - 1)
    assert np.array_equal(F.log_table[F.exp_table[i]], i)
    nz = np.arange(1, F.q)
    assert np.array_equal(F.exp_table[F.log_table[nz]], nz)
    assert len(set(F.exp_table.tolist())) == F.q - 1


@pytest.mark.parametrize("p", [2, 3, 4, 6, 8])
def test_field_axioms_exhaustive(p):
    F = field_new(p)
    M = F.mul_table
    a = np.arange(F.q)
    # add is XOR
    for x in range(F.q):
        assert all(F.add(x, int(y)) == x ^ int(y) for y in a)
    assert np.array_equal(M, M.T)
    assert np.array_equal(M[1], a) and not M[0].any()
    # distributivity a(b+c) = ab + ac over all triples (sampled for q=256)
    rng = np.random.default_rng(p)
    trip = rng.integers(0, F.q, size=(20000, 3)) if F.q > 64 else np.array(list(itertools.product(a, a, a)))
    x, y, z = trip.T
    assert np.array_equal(M[x, y ^ z], M[x, y] ^ M[x, z])
    assert np.array_equal(M[M[x, y], z], M[x, M[y, z]])
    # unique inverses
    for x in range(1, F.q):
        assert np.count_nonzero(M[x] == 1) == 1
        assert M[x, F.inv(x)] == 1


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        field_new(4).inv(0)


def test_non_primitive_rejected():
    # x^4 + x^3 + x^2 + x + 1 is irreducible but has order 5
    with pytest.raises(ValueError):
        Field(4, 0b11111)
    with pytest.raises(ValueError):
        Field(0)


def test_bits_convention():
    F = field_new(4)
    assert F.bits_to_element([1, 0, 0, 0]) == 8
    assert F.bits_to_element([0, 0, 0, 0]) == 0
    with pytest.raises(ValueError):
        F.bits_to_element([1, 0])


@pytest.mark.parametrize("p", [1, 2, 4, 6, 8])
def test_bits_round_trip(p):
    F = field_new(p)
    for e in range(F.q):
        assert F.bits_to_element(F.element_to_bits(e)) == e


@given(st.integers(1, 8), st.data())
def test_pow_matches_repeated_mul(p, data):
    F = field_new(p)
    a = data.draw(st.integers(0, F.q - 1))
    e = data.draw(st.integers(0, 600))
    r = 1
    for _ in range(e):
        r = F.mul(r, a)
    assert F.pow(a, e) == r


@given(st.integers(1, 8), st.data())
def test_div_inverts_mul(p, data):
    F = field_new(p)
    a = data.draw(st.integers(0, F.q - 1))
    b = data.draw(st.integers(1, F.q - 1))
    assert F.div(F.mul(a, b), b) == a


def test_polys_are_registered_for_all_degrees():
    assert sorted(PRIMITIVE_POLYS) == list(range(1, 9))
    for p in PRIMITIVE_POLYS:
        Field(p)
