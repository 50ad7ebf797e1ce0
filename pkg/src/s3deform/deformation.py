"""Truncated power series over Z_p in T1, T2, T3, 2x2 matrices over them, the
explicit universal deformation of the residual S3 representation, and locus
evaluation at points of (pZ_p)^3."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import BadConstantTerm, NonzeroConstantTerm, NotUnit, PrecisionTooLow
from .padic import PadicInt, vp

Exp = tuple[int, int, int]
ZERO_EXP: Exp = (0, 0, 0)
VARIANTS = ("as-printed", "two-parameter")


def _deg(e: Exp) -> int:
    return e[0] + e[1] + e[2]


@dataclass(frozen=True)
class TruncSeries:
    """Element of Z_p[[T1,T2,T3]] modulo (p^N, total degree > D), stored sparsely."""

    p: int
    N: int
    D: int
    coeffs: Mapping[Exp, int] = field(default_factory=dict)

    def __post_init__(self):
        m = self.p ** self.N
        clean = {}
        for e, c in self.coeffs.items():
            e = tuple(int(x) for x in e)
            if len(e) != 3 or min(e) < 0:
                raise ValueError(f"bad exponent {e}")
            c %= m
            if c and _deg(e) <= self.D:
                clean[e] = c
        object.__setattr__(self, "coeffs", clean)

    # construction
    @classmethod
    def const(cls, p: int, N: int, D: int, c) -> "TruncSeries":
        return cls(p, N, D, {ZERO_EXP: _to_mod(c, p ** N)})

    @classmethod
    def var(cls, p: int, N: int, D: int, k: int) -> "TruncSeries":
        e = [0, 0, 0]
        e[k - 1] = 1
        return cls(p, N, D, {tuple(e): 1})

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    def params(self) -> tuple[int, int, int]:
        return (self.p, self.N, self.D)

    def _like(self, coeffs) -> "TruncSeries":
        return TruncSeries(self.p, self.N, self.D, coeffs)

    def _coerce(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            if other.params() != self.params():
                raise ValueError("series with different (p, N, D)")
            return other
        return TruncSeries.const(self.p, self.N, self.D, other)

    # ring operations
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        m, D = self.modulus, self.D
        out: dict[Exp, int] = {}
        items2 = sorted(other.coeffs.items(), key=lambda t: _deg(t[0]))
        for e1, c1 in self.coeffs.items():
            d1 = _deg(e1)
            for e2, c2 in items2:
                if d1 + _deg(e2) > D:
                    break
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                out[e] = (out.get(e, 0) + c1 * c2) % m
        return self._like(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "TruncSeries":
        if k < 0:
            return self.invert() ** (-k)
        result = self.const(self.p, self.N, self.D, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            try:
                other = self._coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.params() == other.params() and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.params(), tuple(sorted(self.coeffs.items()))))

    def constant(self) -> int:
        return self.coeffs.get(ZERO_EXP, 0)

    def nilpotent_part(self) -> "TruncSeries":
        return self._like({e: c for e, c in self.coeffs.items() if e != ZERO_EXP})

    def homogeneous(self, d: int) -> dict[Exp, int]:
        return {e: c for e, c in self.coeffs.items() if _deg(e) == d}

    def invert(self) -> "TruncSeries":
        c0 = self.constant()
        if c0 % self.p == 0:
            raise NotUnit("constant term is not a unit")
        inv0 = pow(c0, -1, self.modulus)
        y = self.nilpotent_part() * inv0  # self = c0 (1 + y)
        return _series_in(y, [(-1) ** k for k in range(self.D + 1)]) * inv0

    def truncate(self, N: int, D: int) -> "TruncSeries":
        if N > self.N or D > self.D:
            raise PrecisionTooLow("can only truncate to lower precision")
        return TruncSeries(self.p, N, D, {e: c for e, c in self.coeffs.items() if _deg(e) <= D})

    def evaluate(self, t: Sequence[int], prec: int) -> int:
        """Value at (t1, t2, t3) modulo p^prec."""
        m = self.p ** prec
        total = 0
        for e, c in self.coeffs.items():
            total += c * pow(t[0], e[0], m) * pow(t[1], e[1], m) * pow(t[2], e[2], m)
        return total % m

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for e in sorted(self.coeffs, key=lambda e: (_deg(e), e)):
            c = _signed(self.coeffs[e], self.modulus)
            mono = "*".join(f"T{k + 1}" + (f"^{x}" if x > 1 else "") for k, x in enumerate(e) if x)
            terms.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(terms).replace("+ -", "- ")


def _signed(x: int, m: int) -> int:
    return x - m if x > m // 2 else x


def _to_mod(c, m: int) -> int:
    if isinstance(c, Fraction):
        return c.numerator * pow(c.denominator, -1, m) % m
    return int(c) % m


def _series_in(y: TruncSeries, coeffs: Sequence) -> TruncSeries:
    """sum_k coeffs[k] y^k for nilpotent y (Horner, stops at degree D)."""
    m = y.modulus
    acc = TruncSeries.const(y.p, y.N, y.D, _to_mod(coeffs[-1], m))
    for c in reversed(coeffs[:-1]):
        acc = acc * y + _to_mod(c, m)
    return acc


def _binom_half(k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out *= (Fraction(1, 2) - i) / (i + 1)
    return out


def series_sqrt_one_unit(x: TruncSeries) -> TruncSeries:
    """The square root with constant term 1 of a series with constant term 1."""
    if x.p == 2:
        raise ValueError("p must be odd")
    if x.constant() != 1:
        raise BadConstantTerm("constant term must be exactly 1")
    y = x.nilpotent_part()
    return _series_in(y, [_binom_half(k) for k in range(x.D + 1)])


# -- 2x2 matrices ------------------------------------------------------------------


@dataclass(frozen=True)
class Mat2:
    a: TruncSeries
    b: TruncSeries
    c: TruncSeries
    d: TruncSeries

    def __post_init__(self):
        ps = {s.params() for s in self.entries()}
        if len(ps) != 1:
            raise ValueError("entries must share (p, N, D)")

    @classmethod
    def from_ints(cls, p: int, N: int, D: int, rows) -> "Mat2":
        (a, b), (c, d) = rows
        k = lambda x: TruncSeries.const(p, N, D, x)
        return cls(k(a), k(b), k(c), k(d))

    @classmethod
    def identity(cls, p: int, N: int, D: int) -> "Mat2":
        return cls.from_ints(p, N, D, ((1, 0), (0, 1)))

    def entries(self) -> tuple[TruncSeries, ...]:
        return (self.a, self.b, self.c, self.d)

    def params(self) -> tuple[int, int, int]:
        return self.a.params()

    def __mul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d,
        )

    def __add__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __pow__(self, k: int) -> "Mat2":
        if k < 0:
            return self.inverse() ** (-k)
        r = Mat2.identity(*self.params())
        for _ in range(k):
            r = r * self
        return r

    def det(self) -> TruncSeries:
        return self.a * self.d - self.b * self.c

    def trace(self) -> TruncSeries:
        return self.a + self.d

    def inverse(self) -> "Mat2":
        di = self.det().invert()
        return Mat2(self.d * di, -self.b * di, -self.c * di, self.a * di)

    def truncate(self, N: int, D: int) -> "Mat2":
        return Mat2(*(e.truncate(N, D) for e in self.entries()))

    def residual(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """Reduction modulo (p, T1, T2, T3)."""
        p = self.a.p
        r = [e.constant() % p for e in self.entries()]
        return ((r[0], r[1]), (r[2], r[3]))

    def first_difference(self, o: "Mat2") -> tuple[str, Exp, int, int] | None:
        for name, x, y in zip(("a", "b", "c", "d"), self.entries(), o.entries()):
            if x != y:
                keys = sorted(set(x.coeffs) | set(y.coeffs), key=lambda e: (_deg(e), e))
                for e in keys:
                    if x.coeffs.get(e, 0) != y.coeffs.get(e, 0):
                        return name, e, x.coeffs.get(e, 0), y.coeffs.get(e, 0)
        return None

    def __str__(self) -> str:
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


# -- the representation ---------------------------------------------------------------


def residual_rep(p: int) -> dict[str, tuple[tuple[int, int], tuple[int, int]]]:
    """Images of sigma and tau mod p."""
    if p <= 3:
        raise ValueError("p must exceed 3")
    h = pow(2, -1, p)
    sigma = ((1, 0), (0, p - 1))
    tau = ((-h % p, h), (-3 * h % p, -h % p))
    return {"sigma": sigma, "tau": tau}


def universal_deformation(p: int, N: int, D: int, variant: str = "as-printed") -> dict[str, Mat2]:
    if p <= 3:
        raise ValueError("p must exceed 3")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    m = p ** N
    h = pow(2, -1, m)
    one = TruncSeries.const(p, N, D, 1)
    zero = TruncSeries.const(p, N, D, 0)
    T1, T2, T3 = (TruncSeries.var(p, N, D, k) for k in (1, 2, 3))
    sigma = Mat2.from_ints(p, N, D, ((1, 0), (0, -1)))
    tau = Mat2.from_ints(p, N, D, ((-h, h), (-3 * h, -h)))
    u = Mat2(one + T1, zero, zero, one + (T2 if variant == "two-parameter" else T1))
    s = series_sqrt_one_unit(one - T3 * T3 * 3)
    v = Mat2(s, T3, T3 * (-3), s)
    return {"sigma": sigma, "tau": tau, "u": u, "v": v}


@dataclass
class RelationResult:
    name: str
    passed: bool
    first_bad: tuple | None = None  # (entry, exponent, got, expected)

    def describe(self) -> str:
        if self.passed:
            return f"{self.name}: pass"
        entry, e, got, want = self.first_bad
        return f"{self.name}: FAIL at entry {entry}, monomial {e}: {got} != {want}"


@dataclass
class RelationReport:
    params: tuple[int, int, int]
    results: list[RelationResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        p, N, D = self.params
        return {
            "p": p, "N": N, "D": D,
            "passed": self.passed,
            "relations": [
                {"name": r.name, "passed": r.passed,
                 "first_bad": None if r.first_bad is None else
                 {"entry": r.first_bad[0], "monomial": list(r.first_bad[1]),
                  "got": r.first_bad[2], "expected": r.first_bad[3]}}
                for r in self.results
            ],
        }


def _check(name: str, lhs: Mat2, rhs: Mat2) -> RelationResult:
    diff = lhs.first_difference(rhs)
    return RelationResult(name, diff is None, diff)


def verify_group_relations(images: Mapping[str, Mat2]) -> RelationReport:
    s, t, u, v = images["sigma"], images["tau"], images["u"], images["v"]
    I = Mat2.identity(*s.params())
    s_inv = s.inverse()
    results = [
        _check("sigma^2 = 1", s * s, I),
        _check("tau^3 = 1", t * t * t, I),
        _check("sigma tau sigma^-1 = tau^-1", s * t * s_inv, t.inverse()),
        _check("sigma u sigma^-1 = u", s * u * s_inv, u),
        _check("tau v tau^-1 = v", t * v * t.inverse(), v),
        _check("sigma v sigma^-1 = v^-1", s * v * s_inv, v.inverse()),
    ]
    dv = v.det()
    one = TruncSeries.const(*dv.params(), 1)
    diff = None
    if dv != one:
        diff = Mat2(dv, one * 0, one * 0, one).first_difference(Mat2(one, one * 0, one * 0, one))
    results.append(RelationResult("det v = 1", diff is None, diff))
    return RelationReport(s.params(), results)


def scalar_u_commutes(images: Mapping[str, Mat2]) -> bool:
    """Whether the u-image commutes with the sigma, tau and v images."""
    u = images["u"]
    return all((u * images[k]).first_difference(images[k] * u) is None for k in ("sigma", "tau", "v"))


@dataclass
class EtaMatrix:
    matrix: Mat2
    congruences_hold: bool  # f = T3, g = -3 T3 in degree one, mod p


def eta_matrix(f: TruncSeries, g: TruncSeries) -> EtaMatrix:
    if f.constant() or g.constant():
        raise NonzeroConstantTerm("f and g must lie in the maximal ideal")
    s = series_sqrt_one_unit(f * g + 1)
    p = f.p
    lin_f = {e: c % p for e, c in f.homogeneous(1).items() if c % p}
    lin_g = {e: c % p for e, c in g.homogeneous(1).items() if c % p}
    ok = lin_f == {(0, 0, 1): 1} and lin_g == {(0, 0, 1): (-3) % p}
    return EtaMatrix(Mat2(s, f, g, s), ok)


def default_fg(p: int, N: int, D: int) -> tuple[TruncSeries, TruncSeries]:
    T3 = TruncSeries.var(p, N, D, 3)
    return T3, T3 * (-3)


# -- specialization ------------------------------------------------------------------


@dataclass(frozen=True)
class SpecializationPoint:
    coords: tuple[PadicInt, PadicInt, PadicInt]
    rationals: tuple[Fraction, Fraction, Fraction] | None = None

    def __post_init__(self):
        for t in self.coords:
            if t.valuation() < 1:
                raise ValueError(f"coordinate {t} is not divisible by p")

    @classmethod
    def from_rationals(cls, p: int, N: int, values: Iterable) -> "SpecializationPoint":
        vals = tuple(Fraction(v) for v in values)
        if len(vals) != 3:
            raise ValueError("need three coordinates")
        m = p ** N
        coords = []
        for v in vals:
            if v != 0 and (vp(v.numerator, p) - vp(v.denominator, p)) < 1:
                raise ValueError(f"{v} does not have positive p-adic valuation")
            coords.append(PadicInt(p, N, _to_mod(v, m)))
        return cls(tuple(coords), vals)

    @property
    def p(self) -> int:
        return self.coords[0].p

    @property
    def N(self) -> int:
        return min(t.precision for t in self.coords)


def _quantity(value: int, p: int, prec: int) -> dict:
    zero = value % p ** prec == 0
    return {
        "value": _signed(value % p ** prec, p ** prec),
        "precision": prec,
        "zero_to_precision": zero,
        "valuation": None if zero else int(vp(value % p ** prec, p)),
    }


def evaluate_loci(point: SpecializationPoint, f: TruncSeries | None = None,
                  g: TruncSeries | None = None) -> dict:
    """Membership of a point in the reducible, ordinary and dihedral loci.

    Degree-d terms have valuation >= d at the point, so truncating at degree D
    costs nothing below p^(D+1): values are known modulo p^min(N, D+1).
    """
    p = point.p
    if f is None or g is None:
        f, g = default_fg(p, point.N, max(point.N - 1, 1))
    prec = min(point.N, f.N, g.N, f.D + 1, g.D + 1)
    if prec < 1:
        raise PrecisionTooLow("no significant p-adic digits survive substitution")
    t = [c.residue for c in point.coords]
    fv = _quantity(f.evaluate(t, prec), p, prec)
    gv = _quantity(g.evaluate(t, prec), p, prec)
    t1 = _quantity(t[0], p, prec)
    d12 = _quantity(t[0] - t[1], p, prec)
    exact_equal = point.rationals is not None and point.rationals[0] == point.rationals[1]
    if exact_equal:
        d12["exact"] = True
    reducible = fv["zero_to_precision"] or gv["zero_to_precision"]
    ordinary = t1["zero_to_precision"] and gv["zero_to_precision"]
    dihedral_t = exact_equal or d12["zero_to_precision"]
    dihedral_fg = fv["zero_to_precision"] and gv["zero_to_precision"]
    return {
        "p": p,
        "precision": prec,
        "point": [str(r) for r in point.rationals] if point.rationals else [c.residue for c in point.coords],
        "f": str(f),
        "g": str(g),
        "values": {"f": fv, "g": gv, "T1": t1, "T1-T2": d12},
        "loci": {
            "inertially_reducible": {"member": reducible, "basis": "f = 0 or g = 0"},
            "ordinary": {"member": ordinary, "basis": "T1 = g = 0"},
            "dihedral": {
                "member": dihedral_t or dihedral_fg,
                "basis": "T1 = T2 or f = g = 0",
                "T1_equals_T2": "exact" if exact_equal else dihedral_t,
                "f_g_vanish": dihedral_fg,
            },
        },
        "notes": [
            "zero to precision is not a proof of exact vanishing",
            "the implication f = g = 0 => T1 = T2 is unproven and not assumed",
        ],
    }


def random_series(rng, p: int, N: int, D: int, terms: int = 8, one_unit: bool = False) -> TruncSeries:
    exps = [e for e in product(range(D + 1), repeat=3) if 0 < _deg(e) <= D]
    chosen = rng.sample(exps, min(terms, len(exps)))
    coeffs = {e: rng.randrange(p ** N) for e in chosen}
    coeffs[ZERO_EXP] = 1 if one_unit else rng.randrange(p ** N)
    return TruncSeries(p, N, D, coeffs)
