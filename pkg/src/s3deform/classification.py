"""Neatness, degeneracy index and genericity of the S3-extension L attached to a
complex cubic field K at a prime p > 3."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import sympy

from . import number_field as nf
from . import padic, polys
from .errors import (
    IndexDivisor,
    NotNeat,
    NotPrime,
    NotTotallyComplex,
    S3DeformError,
    SmallPrime,
    WrongSplittingType,
)

log = logging.getLogger(__name__)

NEAT_TYPE = nf.SplittingType(((2, 1), (1, 1)))


@dataclass(frozen=True)
class ClassifyParams:
    max_index: int = 4
    precision: int | None = None  # p-adic digits; defaults to max_index + 2
    height_bound: int = nf.DEFAULT_HEIGHT_BOUND
    minkowski_ceiling: float = nf.DEFAULT_MINKOWSKI_CEILING

    @property
    def digits(self) -> int:
        return self.precision if self.precision is not None else self.max_index + 2


@dataclass
class ConditionResult:
    passed: bool
    evidence: str


@dataclass
class ClassificationReport:
    polynomial: tuple[int, ...]
    p: int
    field_data: dict[str, Any] = field(default_factory=dict)
    splitting: list[dict[str, Any]] = field(default_factory=list)
    unit: dict[str, Any] = field(default_factory=dict)
    local: dict[str, Any] = field(default_factory=dict)
    class_numbers: dict[str, Any] = field(default_factory=dict)
    conditions: dict[str, ConditionResult] = field(default_factory=dict)
    degeneracy_index: int | str | None = None
    warnings: list[str] = field(default_factory=list)
    precision: dict[str, int] = field(default_factory=dict)
    failure: dict[str, str] | None = None

    @property
    def neat(self) -> bool | None:
        if len(self.conditions) < 3:
            return None
        return all(c.passed for c in self.conditions.values())

    @property
    def generic(self) -> bool:
        # generic <=> neat and index 0, by construction
        return self.neat is True and self.degeneracy_index == 0

    @property
    def verdict(self) -> str:
        if self.failure is not None:
            return "failed"
        if self.neat is False:
            return "not neat"
        if self.degeneracy_index is None:
            return "incomplete"
        return "generic" if self.degeneracy_index == 0 else "degenerate"

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["polynomial"] = list(self.polynomial)
        d["polynomial_str"] = nf.polys_str(self.polynomial)
        d["conditions"] = {k: asdict(v) for k, v in self.conditions.items()}
        d["neat"] = self.neat
        d["generic"] = self.generic
        d["verdict"] = self.verdict
        return d

    def render_text(self) -> str:
        lines = [f"cubic      {nf.polys_str(self.polynomial)}", f"prime      p = {self.p}"]
        if self.field_data:
            fd = self.field_data
            lines.append(f"disc       poly {fd['poly_disc']}, field {fd['field_disc']}, index {fd['index']}")
            lines.append("ramified   {" + ", ".join(str(q) for q in fd["ramified_primes"]) + "}")
        for s in self.splitting:
            lines.append(
                f"  q={s['prime']}: type {s['type']}, residue field of L has {s['residue_field_size']}"
                f" elements, p-th roots of unity: {'yes' if s['contains_pth_roots_of_unity'] else 'no'}")
        if self.unit:
            lines.append(f"unit       {self.unit['unit']}  (inverse {self.unit['inverse']}, "
                         f"{'certified' if self.unit['certified'] else 'heuristic'})")
        if self.local:
            loc = self.local
            if "hensel_root" in loc:
                hr = loc["hensel_root"]
                lines.append(f"root       {hr['residue']} mod {self.p}^{hr['precision']}")
            if "unit_image" in loc:
                ui = loc["unit_image"]
                lines.append(f"image      {loc['witness_unit']} -> {ui['residue']} mod {self.p}^{ui['precision']}"
                             f" (= {loc['unit_image_mod_p2']} mod {self.p}^2)")
            if "ramified_root" in loc:
                lines.append(f"ramified   root {loc['ramified_root']} in {loc['ramified_field']},"
                             f" unit power index {loc['ramified_power_index']}")
        if self.class_numbers:
            cn = self.class_numbers
            lines.append(f"class no.  h(k) = {cn.get('h_k')}, h(K) divides {cn.get('h_K_multiple')}")
        for name, c in self.conditions.items():
            lines.append(f"{name}  {'pass' if c.passed else 'FAIL'}: {c.evidence}")
        lines.append(f"neat       {self.neat}")
        lines.append(f"index      {self.degeneracy_index}")
        lines.append(f"verdict    {self.verdict}")
        for w in self.warnings:
            lines.append(f"warning    {w}")
        if self.failure:
            lines.append(f"failure    {self.failure['error']}: {self.failure['message']}")
        return "\n".join(lines)


# -- helpers -------------------------------------------------------------------


def _check_prime(p: int) -> None:
    if p <= 3:
        raise SmallPrime(f"p = {p} must exceed 3")
    if not sympy.isprime(p):
        raise NotPrime(f"{p} is not prime")


def _frac_mod(c: Fraction, m: int) -> int:
    return c.numerator * pow(c.denominator, -1, m) % m


def unit_image_qp(u: Sequence, root: padic.PadicInt) -> padic.PadicInt:
    """Image of the power-basis element u under x -> root."""
    m = root.modulus
    coeffs = [_frac_mod(Fraction(c), m) for c in u]
    val = (coeffs[0] + coeffs[1] * root.residue + coeffs[2] * root.residue ** 2) % m
    return padic.PadicInt(root.p, root.precision, val)


def unit_image_quad(u: Sequence, z: padic.LocalQuadElement) -> padic.LocalQuadElement:
    p = z.field.p
    ka, kb = z.field.moduli_exponents(z.prec)
    m = p ** (max(ka, kb) + 1)
    c = [_frac_mod(Fraction(x), m) for x in u]
    return z * z * c[2] + z * c[1] + c[0]


def _simple_root(f: Sequence[int], p: int) -> int:
    simple = [r for r, mult in polys.roots_mod(f, p) if mult == 1]
    if len(simple) != 1:
        raise WrongSplittingType(f"expected one simple root of f mod {p}, found {len(simple)}")
    return simple[0]


def _witness_unit(K: nf.CubicFieldData, eps: tuple) -> tuple:
    """The representative of eps^{+-1} with the smaller coefficients (used for display)."""
    inv = nf._normalize_sign(nf.pinverse(K.f, eps))
    height = lambda u: max(abs(Fraction(c)) for c in u)
    return inv if height(inv) < height(eps) else eps


def _residue_data(K: nf.CubicFieldData, q: int, p: int, d_k: int) -> dict[str, Any]:
    """Residue field size and ramification of the primes of L above a ramified prime q."""
    st = nf.prime_splitting_type(K, q, allow_index_divisor=True)
    if q == p:
        f_L, e_p = 1, 2
    elif any(e == 2 for e, _ in st.pairs):
        # partially ramified in K: L = Kk, and q ramifies in k, so f_L = max f of K
        f_L, e_p = max(f for _, f in st.pairs), 1
    else:
        f_L, e_p = (2 if q != 2 and sympy.jacobi_symbol(d_k % q, q) == -1 else 1), 1
        if q == 2 and d_k % 8 == 5:
            f_L = 2
    size = q ** f_L
    return {
        "prime": q,
        "type": st.as_list(),
        "residue_degree_in_L": f_L,
        "residue_field_size": size,
        "contains_pth_roots_of_unity": padic.contains_pth_roots_of_unity(size, e_p, p),
    }


# -- the three conditions --------------------------------------------------------


def neatness_check(f: Sequence[int], p: int, params: ClassifyParams | None = None,
                   report: ClassificationReport | None = None) -> ClassificationReport:
    params = params or ClassifyParams()
    f = polys.monic_cubic(f)
    _check_prime(p)
    rep = report or ClassificationReport(polynomial=f, p=p)
    rep.precision = {"p_adic_digits": params.digits, "max_index": params.max_index}

    K = nf.maximal_order_basis(f)
    ramified = sorted(int(q) for q in sympy.factorint(abs(K.field_disc)))
    rep.field_data = {
        "poly_disc": K.poly_disc,
        "field_disc": K.field_disc,
        "index": K.index,
        "signature": list(K.signature),
        "integral_basis": [nf.format_element(b) for b in K.integral_basis],
        "ramified_primes": ramified,
    }
    if K.signature != (1, 1):
        raise NotTotallyComplex(f"{nf.polys_str(f)} has three real roots")
    if K.index % p == 0:
        raise IndexDivisor(f"p = {p} divides the index {K.index}")
    st = nf.prime_splitting_type(K, p)
    if st != NEAT_TYPE:
        raise WrongSplittingType(f"{p} has type {st.as_list()} in K, need [[2, 1], [1, 1]]")

    d_k = nf.fundamental_discriminant(K.field_disc)
    rep.splitting = [_residue_data(K, q, p, d_k) for q in ramified]
    bad = [s["prime"] for s in rep.splitting if s["contains_pth_roots_of_unity"]]
    rep.conditions["condition3"] = ConditionResult(
        passed=not bad,
        evidence=("no ramified completion of L contains p-th roots of unity" if not bad
                  else f"p-th roots of unity at q in {bad}"),
    )

    # condition 2: p-part of Cl(L) is built from Cl(k) and Cl(K)
    h_k = nf.imaginary_quadratic_class_number(d_k)
    ev = nf.class_group_evidence(K, p, ceiling=params.minkowski_ceiling)
    rep.class_numbers = {
        "quadratic_discriminant": d_k,
        "h_k": h_k,
        "h_K_multiple": ev.multiple_of_h,
        "minkowski_bound": round(ev.minkowski_bound, 4),
        "relations": ev.relations,
        "criterion": "p does not divide h_L iff p divides neither h_k nor h_K",
    }
    c2_ok = h_k % p != 0 and ev.prime_to_p(p)
    rep.conditions["condition2"] = ConditionResult(
        passed=c2_ok,
        evidence=f"h_k = {h_k}, h_K divides {ev.multiple_of_h}" + ("" if c2_ok else f"; p = {p} not excluded"),
    )
    rep.warnings.append("h_L prime to p derived from the quadratic and cubic subfields")

    # condition 1: the fundamental unit at the ramified place above p
    eps = nf.find_fundamental_unit(K, height_bound=params.height_bound)
    wit = _witness_unit(K, eps.coords)
    inverse = nf._normalize_sign(nf.pinverse(K.f, eps.coords))
    rep.unit = {
        "unit": str(eps),
        "coords": [str(c) for c in eps.coords],
        "inverse": nf.format_element(inverse),
        "norm": eps.norm,
        "real_embedding": eps.real_value,
        "regulator": eps.regulator,
        "certified": eps.certified,
        "checks": {k: v for k, v in eps.checks.items()},
    }
    if not eps.certified:
        rep.warnings.append("fundamentality of the unit is heuristic")
    rep.warnings.append("units of the cubic subfields assumed to generate the units of L up to index prime to p")

    fld = padic.quadratic_factor_field(f, p)
    mprec = 2 * params.digits
    z = padic.quad_embed_cubic_root(f, fld, mprec)
    img = unit_image_quad(wit, z)
    ram_index = padic.quad_unit_power_index(img, 1)
    rep.local.update({
        "ramified_field": str(fld),
        "ramified_root": str(z.reduce(2)),
        "ramified_unit_image": str(img.reduce(2)),
        "ramified_power_index": ram_index,
        "ramified_m_precision": mprec,
    })
    rep.conditions["condition1"] = ConditionResult(
        passed=ram_index == 0,
        evidence=(f"unit is not a p-th power in {fld}"
                  + ("; places not above p impose nothing since their completions lack p-th roots of unity"
                     if rep.conditions["condition3"].passed else "")
                  if ram_index == 0 else f"unit is a p-th power in {fld}"),
    )
    rep.conditions = {k: rep.conditions[k] for k in ("condition1", "condition2", "condition3")}
    rep._witness = (K, wit)  # type: ignore[attr-defined]
    return rep


def _index_from(rep: ClassificationReport, params: ClassifyParams) -> int:
    K, wit = rep._witness  # type: ignore[attr-defined]
    p = rep.p
    N = params.digits
    r = padic.hensel_lift_root(K.f, p, _simple_root(K.f, p), N)
    img = unit_image_qp(wit, r)
    idx = padic.pth_power_index_qp(img, params.max_index)
    rep.local.update({
        "hensel_root": {"residue": r.residue, "precision": N},
        "witness_unit": nf.format_element(wit),
        "unit_image": {"residue": img.residue, "precision": N},
        "unit_image_mod_p2": img.residue % (p * p),
        "unit_image_signed_mod_p2": _signed(img.residue % (p * p), p * p),
        "unramified_power_index": idx,
    })
    return idx


def _signed(x: int, m: int) -> int:
    return x - m if x > m // 2 else x


def degeneracy_index(f: Sequence[int], p: int, params: ClassifyParams | None = None) -> int:
    params = params or ClassifyParams()
    rep = neatness_check(f, p, params)
    if not rep.neat:
        failed = [k for k, c in rep.conditions.items() if not c.passed]
        raise NotNeat(f"{nf.polys_str(rep.polynomial)} is not neat at {p}: {failed}")
    return _index_from(rep, params)


def classify_extension(f: Sequence[int], p: int, params: ClassifyParams | None = None,
                       strict: bool = False) -> ClassificationReport:
    """Full report.  Errors become a structured failure section unless ``strict``."""
    params = params or ClassifyParams()
    try:
        coeffs = polys.monic_cubic(f)
    except ValueError:
        if strict:
            raise
        coeffs = tuple(int(c) for c in f)
    rep = ClassificationReport(polynomial=coeffs, p=p)
    try:
        neatness_check(coeffs, p, params, report=rep)
        if rep.neat:
            rep.degeneracy_index = _index_from(rep, params)
            if rep.local["ramified_power_index"] != 0:
                raise AssertionError("neat field with a p-th power unit at the ramified place")
        else:
            rep.degeneracy_index = "not neat"
    except S3DeformError as exc:
        if strict:
            raise
        rep.failure = {"error": type(exc).__name__, "message": str(exc)}
    finally:
        rep.__dict__.pop("_witness", None)
    return rep
