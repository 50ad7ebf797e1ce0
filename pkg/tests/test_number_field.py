import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st

from s3deform import polys
from s3deform.errors import NotFundamental, NotTotallyComplex, Reducible, SearchExhausted
from s3deform.number_field import (
    charpoly,
    cubic_class_number_prime_to_p,
    class_group_evidence,
    dedekind_test,
    find_fundamental_unit,
    fundamental_discriminant,
    imaginary_quadratic_class_number,
    is_fundamental_discriminant,
    is_integral,
    maximal_order_basis,
    norm,
    normalize_unit,
    pinverse,
    pmul,
    ppow,
    prime_splitting_type,
    unit_search_bruteforce,
)

FLAGSHIP = (1, 0, 7, -12)


def _kronecker(D, n):
    out = 1
    for q, e in sympy.factorint(n).items():
        if q == 2:
            s = 0 if D % 2 == 0 else (1 if D % 8 in (1, 7) else -1)
        else:
            s = sympy.jacobi_symbol(D % q, q)
        out *= s ** e
    return out


def _dirichlet_class_number(D):
    w = {-3: 6, -4: 4}.get(D, 2)
    s = sum(_kronecker(D, a) * a for a in range(1, -D))
    return Fraction(-w * s, 2 * -D)


def test_flagship_invariants():
    K = maximal_order_basis(FLAGSHIP)
    assert K.poly_disc == -5260
    assert K.field_disc == -1315
    assert K.index == 2
    assert K.signature == (1, 1)
    assert dedekind_test(K.f, 2) > 0


@pytest.mark.parametrize("f,disc,index", [
    ((1, 0, 0, -2), -108, 1),
    ((1, 0, 1, 1), -31, 1),
    ((1, 0, -1, -1), -23, 1),
    ((1, 0, 0, -10), -300, 3),
])
def test_known_discriminants(f, disc, index):
    K = maximal_order_basis(f)
    assert K.poly_disc == K.index ** 2 * K.field_disc
    assert (K.field_disc, K.index) == (disc, index)


def test_reducible_rejected():
    with pytest.raises(Reducible):
        maximal_order_basis((1, 0, 0, -1))


cubics = st.tuples(st.just(1), st.integers(-6, 6), st.integers(-30, 30), st.integers(-30, 30).filter(bool))


small_cubics = st.tuples(st.just(1), st.integers(-3, 3), st.integers(-9, 9), st.integers(-9, 9).filter(bool))


def _unit_or_skip(K):
    try:
        return find_fundamental_unit(K, height_bound=10 ** 15)
    except SearchExhausted:
        assume(False)


def _irreducible(f):
    return not polys.rational_roots_monic(f) and polys.cubic_discriminant(f) != 0


@settings(max_examples=40, deadline=None)
@given(cubics, st.integers(-5, 5), st.integers(2, 3))
def test_field_disc_independent_of_generator(f, c, k):
    if not _irreducible(f):
        return
    K = maximal_order_basis(f)
    assert K.poly_disc == K.index ** 2 * K.field_disc
    for b in K.integral_basis:
        assert is_integral(K.f, b)
    # x -> x + c and x -> k x generate the same field
    K2 = maximal_order_basis(polys.shift(f, c))
    _, a2, a1, a0 = f
    K3 = maximal_order_basis((1, k * a2, k * k * a1, k ** 3 * a0))
    assert K2.field_disc == K.field_disc == K3.field_disc


@settings(max_examples=30, deadline=None)
@given(cubics, st.sampled_from([2, 3, 5, 7, 11, 13, 263]))
def test_splitting_matches_factorization(f, q):
    if not _irreducible(f):
        return
    K = maximal_order_basis(f)
    st_ = prime_splitting_type(K, q, allow_index_divisor=True)
    assert sum(e * g for e, g in st_.pairs) == 3
    if K.index % q:
        pattern = sorted(((m, len(g) - 1) for g, m in polys.factor_mod(f, q)), reverse=True)
        assert st_ == pattern


def test_flagship_ramified_types():
    K = maximal_order_basis(FLAGSHIP)
    assert prime_splitting_type(K, 5) == [(2, 1), (1, 1)]
    assert prime_splitting_type(K, 263) == [(2, 1), (1, 1)]


@pytest.mark.parametrize("f,unit", [
    (FLAGSHIP, (1733, 266, 196)),
    ((1, 0, 0, -2), (1, 1, 1)),
    ((1, 0, 1, 1), (1, 0, 1)),
    ((1, 0, -1, -1), (0, 1, 0)),
])
def test_fundamental_units(f, unit):
    K = maximal_order_basis(f)
    u = find_fundamental_unit(K)
    assert u.coords == tuple(Fraction(c) for c in unit)
    assert u.certified
    assert abs(u.norm) == 1


def test_flagship_unit_inverse_is_linear():
    u = find_fundamental_unit(maximal_order_basis(FLAGSHIP))
    inv = pinverse(FLAGSHIP, u.coords)
    assert inv == (-19, 14, 0)
    assert pmul(FLAGSHIP, u.coords, inv) == (1, 0, 0)


@settings(max_examples=15, deadline=None)
@given(small_cubics)
def test_unit_matches_bruteforce(f):
    if not _irreducible(f) or polys.cubic_discriminant(f) > 0:
        return
    K = maximal_order_basis(f)
    u = _unit_or_skip(K)
    brute = unit_search_bruteforce(K, 4)
    if brute is None:
        return
    # the smallest unit in the box is a positive power of the fundamental one
    k = round(math.log(abs(float(_real_value(K, brute)))) / math.log(abs(u.real_value)))
    assert k >= 1
    assert normalize_unit(K, ppow(K.f, u.coords, k)) == brute


def _real_value(K, u):
    roots = [r for r in sympy.Poly(list(K.f), sympy.Symbol("x")).nroots() if abs(sympy.im(r)) < 1e-12]
    rho = float(sympy.re(roots[0]))
    return sum(float(c) * rho ** i for i, c in enumerate(u))


@settings(max_examples=25, deadline=None)
@given(small_cubics)
def test_unit_norm_and_idempotent_normalization(f):
    if not _irreducible(f) or polys.cubic_discriminant(f) > 0:
        return
    K = maximal_order_basis(f)
    u = _unit_or_skip(K)
    assert norm(K.f, u.coords) in (1, -1)
    cp = charpoly(K.f, u.coords)
    assert all(Fraction(c).denominator == 1 for c in cp)
    assert normalize_unit(K, u.coords) == u.coords
    assert normalize_unit(K, pinverse(K.f, u.coords)) == u.coords
    assert normalize_unit(K, tuple(-c for c in u.coords)) == u.coords


def test_totally_real_rejected():
    with pytest.raises(NotTotallyComplex):
        find_fundamental_unit(maximal_order_basis((1, 0, -7, 1)))


@pytest.mark.parametrize("D", [d for d in range(-200, -2) if is_fundamental_discriminant(d)])
def test_class_number_matches_dirichlet_formula(D):
    assert imaginary_quadratic_class_number(D) == _dirichlet_class_number(D)


def test_class_numbers_known():
    assert [imaginary_quadratic_class_number(d) for d in (-3, -4, -23, -47, -71, -163, -1315)] == [1, 1, 3, 5, 7, 1, 6]
    assert imaginary_quadratic_class_number(-5260, reduce=True) == 6
    assert fundamental_discriminant(-5260) == -1315
    with pytest.raises(NotFundamental):
        imaginary_quadratic_class_number(-12)


def test_cubic_class_group_flagship():
    K = maximal_order_basis(FLAGSHIP)
    ev = class_group_evidence(K, 5)
    assert ev.prime_to_p(5)
    # run to stability the lattice determinant reaches h_K = 1
    assert class_group_evidence(K).multiple_of_h == 1
    assert cubic_class_number_prime_to_p(K, 5)
