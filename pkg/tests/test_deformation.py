import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from s3deform.deformation import (
    Mat2,
    SpecializationPoint,
    TruncSeries,
    default_fg,
    eta_matrix,
    evaluate_loci,
    random_series,
    residual_rep,
    scalar_u_commutes,
    series_sqrt_one_unit,
    universal_deformation,
    verify_group_relations,
)
from s3deform.errors import BadConstantTerm, NonzeroConstantTerm, NotUnit

P, N, D = 5, 4, 4


def triple(seed, one_unit=False):
    rng = random.Random(seed)
    return [random_series(rng, P, N, D, terms=6, one_unit=one_unit) for _ in range(3)]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_ring_laws(seed):
    a, b, c = triple(seed)
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == TruncSeries.const(P, N, D, 0)
    assert a ** 3 == a * a * a


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_inverse(seed):
    a, _, _ = triple(seed, one_unit=True)
    assert a * a.invert() == TruncSeries.const(P, N, D, 1)
    z = a.nilpotent_part()
    with pytest.raises(NotUnit):
        z.invert()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, N), st.integers(0, D))
def test_truncation_is_a_ring_map(seed, N2, D2):
    a, b, _ = triple(seed)
    assert (a * b).truncate(N2, D2) == a.truncate(N2, D2) * b.truncate(N2, D2)
    assert (a + b).truncate(N2, D2) == a.truncate(N2, D2) + b.truncate(N2, D2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 9), st.lists(st.integers(-10 ** 6, 10 ** 6), min_size=3, max_size=3))
def test_evaluation_is_a_ring_map(seed, pt):
    a, b, _ = triple(seed)
    t = [P * x for x in pt]
    prec = min(N, D + 1)
    m = P ** prec
    assert (a * b).evaluate(t, prec) == a.evaluate(t, prec) * b.evaluate(t, prec) % m
    assert (a + b).evaluate(t, prec) == (a.evaluate(t, prec) + b.evaluate(t, prec)) % m


def test_sqrt_contract_200_seeded():
    rng = random.Random(20240501)
    for _ in range(200):
        x = random_series(rng, 7, 6, 6, terms=10, one_unit=True)
        s = series_sqrt_one_unit(x)
        assert s * s == x
        assert s.constant() == 1
    with pytest.raises(BadConstantTerm):
        series_sqrt_one_unit(TruncSeries.const(7, 3, 3, 4))


@pytest.mark.parametrize("N_", [2, 4, 6, 8])
@pytest.mark.parametrize("D_", [2, 4, 6, 8])
def test_relations_grid(N_, D_):
    for variant in ("as-printed", "two-parameter"):
        images = universal_deformation(5, N_, D_, variant)
        report = verify_group_relations(images)
        assert report.passed, [r.describe() for r in report.results if not r.passed]
        res = residual_rep(5)
        assert images["sigma"].residual() == res["sigma"]
        assert images["tau"].residual() == res["tau"]
        assert images["u"].residual() == ((1, 0), (0, 1))
        assert images["v"].residual() == ((1, 0), (0, 1))


def test_residual_rep_relations():
    s, t = residual_rep(7)["sigma"], residual_rep(7)["tau"]
    S = Mat2.from_ints(7, 1, 0, s)
    T = Mat2.from_ints(7, 1, 0, t)
    I = Mat2.identity(7, 1, 0)
    assert S * S == I and T * T * T == I
    assert S * T * S == T * T


def test_mutation_is_caught():
    images = universal_deformation(5, 6, 6)
    v = images["v"]
    T3 = TruncSeries.var(5, 6, 6, 3)
    images["v"] = Mat2(v.a, v.b, T3 * (-2), v.d)
    report = verify_group_relations(images)
    failed = {r.name for r in report.results if not r.passed}
    assert {"tau v tau^-1 = v", "sigma v sigma^-1 = v^-1", "det v = 1"} <= failed
    for r in report.results:
        if not r.passed:
            assert r.first_bad is not None
            assert "FAIL" in r.describe()


def test_scalar_u_flag():
    assert scalar_u_commutes(universal_deformation(5, 4, 4, "as-printed"))
    assert not scalar_u_commutes(universal_deformation(5, 4, 4, "two-parameter"))


def test_eta_matches_v():
    f, g = default_fg(5, 6, 6)
    eta = eta_matrix(f, g)
    assert eta.congruences_hold
    assert eta.matrix == universal_deformation(5, 6, 6)["v"]
    assert eta.matrix.det() == TruncSeries.const(5, 6, 6, 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_eta_det_one_for_any_fg(seed):
    rng = random.Random(seed)
    f = random_series(rng, 7, 4, 4, terms=5).nilpotent_part()
    g = random_series(rng, 7, 4, 4, terms=5).nilpotent_part()
    eta = eta_matrix(f, g)
    assert eta.matrix.det() == TruncSeries.const(7, 4, 4, 1)
    with pytest.raises(NonzeroConstantTerm):
        eta_matrix(f + 7, g)


@pytest.mark.parametrize("t2", [Fraction(5), Fraction(10, 3), Fraction(-25), Fraction(125, 7)])
def test_point_family_on_ordinary_and_reducible(t2):
    pt = SpecializationPoint.from_rationals(5, 6, [0, t2, 0])
    rep = evaluate_loci(pt)
    assert rep["loci"]["ordinary"]["member"]
    assert rep["loci"]["inertially_reducible"]["member"]


def test_generic_points_on_neither():
    rng = random.Random(99)
    for _ in range(200):
        t = [5 * rng.randrange(1, 5 ** 5) for _ in range(3)]
        t = [x if x % 25 else x + 5 for x in t]  # keep valuation exactly 1
        rep = evaluate_loci(SpecializationPoint.from_rationals(5, 6, t))
        assert not rep["loci"]["ordinary"]["member"]
        assert not rep["loci"]["inertially_reducible"]["member"]


def test_dihedral_exact_and_notes():
    rep = evaluate_loci(SpecializationPoint.from_rationals(5, 6, [5, 5, 5]))
    assert rep["loci"]["dihedral"]["member"]
    assert rep["loci"]["dihedral"]["T1_equals_T2"] == "exact"
    rep = evaluate_loci(SpecializationPoint.from_rationals(5, 6, [0, 5, 5]))
    assert not any(v["member"] for v in rep["loci"].values())
    assert any("unproven" in n for n in rep["notes"])
    # equal only to precision is reported as such, not as exact
    rep = evaluate_loci(SpecializationPoint.from_rationals(5, 3, [5, 5 + 5 ** 4, 5]))
    assert rep["loci"]["dihedral"]["T1_equals_T2"] is True


def test_point_validation():
    with pytest.raises(ValueError):
        SpecializationPoint.from_rationals(5, 4, [1, 5, 5])
    with pytest.raises(ValueError):
        SpecializationPoint.from_rationals(5, 4, [Fraction(1, 5) * 5, 5, 5])
