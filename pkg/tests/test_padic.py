import itertools

import pytest
from hypothesis import given, settings, strategies as st

from s3deform import polys
from s3deform.errors import BadValuation, NotRoot, NotSimpleRoot, NotUnit, PrecisionTooLow, SquareDiscriminant
from s3deform.padic import (
    PadicInt,
    contains_pth_roots_of_unity,
    hensel_lift_root,
    make_quadratic_extension,
    pth_power_index_qp,
    quad_embed_cubic_roots,
    quad_unit_power_index,
    quadratic_factor_field,
)

FLAGSHIP = (1, 0, 7, -12)


def test_hensel_flagship_root():
    r = hensel_lift_root(FLAGSHIP, 5, 2, 6)
    assert r.residue == 7562
    assert r.residue % 125 == 62
    assert polys.evaluate(FLAGSHIP, r.residue, 5 ** 6) == 0


def test_hensel_rejects_bad_start():
    with pytest.raises(NotRoot):
        hensel_lift_root(FLAGSHIP, 5, 1, 4)
    # x^3 + 7x - 12 = (x - 2)(x + 1)^2 mod 5
    with pytest.raises(NotSimpleRoot):
        hensel_lift_root(FLAGSHIP, 5, 4, 4)


@settings(max_examples=60, deadline=None)
@given(
    p=st.sampled_from([5, 7, 11, 13]),
    r=st.integers(-50, 50),
    b=st.integers(-50, 50),
    c=st.integers(-50, 50),
    N=st.integers(1, 12),
)
def test_hensel_lift_is_unique_root(p, r, b, c, N):
    f = polys.mul([1, -r], [1, b, c])
    if polys.evaluate(polys.derivative(f), r, p) == 0:
        return
    lift = hensel_lift_root(f, p, r % p, N)
    m = p ** N
    assert polys.evaluate(f, lift.residue, m) == 0
    assert lift.residue % p == r % p
    # the root of f congruent to r mod p is r itself
    assert lift.residue == r % m
    # precision monotonicity
    higher = hensel_lift_root(f, p, r % p, N + 3)
    assert higher.reduce(N) == lift


@pytest.mark.parametrize("p", [5, 7])
def test_power_index_matches_enumeration(p):
    N = 4
    m = p ** N
    pth = {pow(v, p, m) for v in range(m) if v % p}
    p2th = {pow(v, p * p, m) for v in range(m) if v % p}
    for u in range(m):
        if u % p == 0:
            continue
        i = pth_power_index_qp(PadicInt(p, N, u), 3)
        assert (i >= 1) == (u in pth), u
        assert (i >= 2) == (u in p2th), u


def test_power_index_errors():
    with pytest.raises(NotUnit):
        pth_power_index_qp(PadicInt(5, 4, 10), 2)
    with pytest.raises(PrecisionTooLow):
        pth_power_index_qp(PadicInt(5, 2, 3), 2)


def _fifth_power_image(fld, prec):
    p = fld.p
    ka, kb = fld.moduli_exponents(prec)
    image = set()
    for a in range(p ** ka):
        for b in range(p ** kb if kb else 1):
            v = fld.element(a, b, prec)
            if v.valuation == 0:
                z = v ** 5
                image.add((z.a, z.b))
    return image


@pytest.mark.parametrize("d,prec", [(10, 5), (2, 3)])
def test_quadratic_power_index_matches_enumeration(d, prec):
    fld = make_quadratic_extension(5, d)
    image = _fifth_power_image(fld, prec)
    ka, kb = fld.moduli_exponents(prec)
    count = 0
    for a in range(5 ** ka):
        for b in range(5 ** kb if kb else 1):
            z = fld.element(a, b, prec)
            if z.valuation != 0:
                continue
            count += 1
            assert (quad_unit_power_index(z, 1) >= 1) == ((z.a, z.b) in image), (a, b)
    assert count > 0


def test_ramified_one_unit_threshold():
    # in Q_5(sqrt 10) a 1-unit is a fifth power exactly when it is 1 mod m^3
    fld = make_quadratic_extension(5, 10)
    image = _fifth_power_image(fld, 5)
    for a in range(125):
        for b in range(25):
            z = fld.element(a, b, 5)
            if not z.congruent_one_mod(1):
                continue
            assert z.congruent_one_mod(3) == ((z.a, z.b) in image)


def test_quadratic_extension_kinds():
    assert make_quadratic_extension(5, 10).kind == "ramified"
    assert make_quadratic_extension(5, 2).kind == "unramified"
    with pytest.raises(SquareDiscriminant):
        make_quadratic_extension(5, 4)
    with pytest.raises(BadValuation):
        make_quadratic_extension(5, 50)


def test_flagship_quadratic_factor_and_conjugates():
    fld = quadratic_factor_field(FLAGSHIP, 5)
    assert (fld.d, fld.kind) == (10, "ramified")
    plus, minus = quad_embed_cubic_roots(FLAGSHIP, fld, 6)
    assert plus.reduce(2) == fld.element(4, 1, 2)
    assert plus.conjugate() == minus
    r = hensel_lift_root(FLAGSHIP, 5, 2, 6).residue
    # the three roots sum to 0 and multiply to 12
    assert (plus + minus + r).is_zero()
    assert (plus * minus * r - 12).is_zero()
    for z in (plus, minus):
        assert (z * z * z + z * 7 - 12).is_zero()


@settings(max_examples=25, deadline=None)
@given(st.integers(-40, 40), st.integers(-40, 40))
def test_embedded_roots_are_conjugate_roots(c1, c0):
    f = (1, 0, c1, c0)
    if polys.rational_roots_monic(f) or polys.cubic_discriminant(f) == 0:
        return
    p = 7
    try:
        fld = quadratic_factor_field(f, p)
    except Exception:
        return
    plus, minus = quad_embed_cubic_roots(f, fld, 4)
    assert plus.conjugate() == minus
    for z in (plus, minus):
        assert (z * z * z + z * c1 + c0).is_zero()


@pytest.mark.parametrize("q,e,p,expected", [(263, 1, 5, False), (11, 1, 5, True), (5, 2, 5, False), (5, 4, 5, True)])
def test_roots_of_unity(q, e, p, expected):
    assert contains_pth_roots_of_unity(q, e, p) is expected


def test_precision_monotone_quadratic():
    fld = make_quadratic_extension(5, 10)
    lo = quad_embed_cubic_roots(FLAGSHIP, fld, 4)[0]
    hi = quad_embed_cubic_roots(FLAGSHIP, fld, 8)[0]
    assert hi.reduce(4) == lo
    for a, b in itertools.product(range(1, 5), range(5)):
        z = fld.element(a, b, 8)
        assert quad_unit_power_index(z, 3) == quad_unit_power_index(z.reduce(7), 3)
