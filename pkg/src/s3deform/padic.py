"""Finite-precision arithmetic in Z_p and in quadratic extensions Q_p(sqrt d).

Every value carries its precision.  Equality and zero tests are only ever
meant "to precision"; nothing here claims exact vanishing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

from . import polys
from .errors import (
    BadValuation,
    NoQuadraticFactor,
    NotRoot,
    NotSimpleRoot,
    NotUnit,
    PrecisionTooLow,
    SquareDiscriminant,
    WrongField,
)

INF = math.inf


def vp(n: int, p: int) -> float:
    """p-adic valuation of an integer (inf for 0)."""
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _vp_capped(n: int, p: int, cap: int) -> int:
    n %= p ** cap
    if n == 0:
        return cap
    return int(vp(n, p))


def is_square_unit_mod_p(u: int, p: int) -> bool:
    return pow(u % p, (p - 1) // 2, p) == 1


@dataclass(frozen=True)
class PadicInt:
    """An element of Z_p known modulo p**precision."""

    p: int
    precision: int
    residue: int

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be positive")
        object.__setattr__(self, "residue", self.residue % self.p ** self.precision)

    @property
    def modulus(self) -> int:
        return self.p ** self.precision

    def _coerce(self, other) -> "PadicInt":
        if isinstance(other, PadicInt):
            if other.p != self.p:
                raise ValueError(f"mixed primes {self.p} and {other.p}")
            return other
        if isinstance(other, int):
            return PadicInt(self.p, self.precision, other)
        return NotImplemented

    def _binop(self, other, op):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.precision, other.precision)
        return PadicInt(self.p, prec, op(self.residue, other.residue))

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicInt(self.p, self.precision, -self.residue)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return PadicInt(self.p, self.precision, pow(self.residue, e, self.modulus))

    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    def inverse(self) -> "PadicInt":
        if not self.is_unit():
            raise NotUnit(f"{self} is not a unit")
        return PadicInt(self.p, self.precision, pow(self.residue, -1, self.modulus))

    def valuation(self) -> float:
        """Valuation, or inf when the element is zero to precision."""
        if self.residue == 0:
            return INF
        return vp(self.residue, self.p)

    def is_zero(self) -> bool:
        return self.residue == 0

    def equals(self, other) -> bool:
        """Equality to the common precision."""
        other = self._coerce(other)
        prec = min(self.precision, other.precision)
        m = self.p ** prec
        return (self.residue - other.residue) % m == 0

    def reduce(self, precision: int) -> "PadicInt":
        if precision > self.precision:
            raise PrecisionTooLow(f"cannot raise precision {self.precision} to {precision}")
        return PadicInt(self.p, precision, self.residue)

    def __str__(self):
        return f"{self.residue} + O({self.p}^{self.precision})"


def hensel_lift_root(f: Sequence[int], p: int, r0: int, N: int) -> PadicInt:
    """Lift a simple root ``r0`` of ``f`` mod p to a root modulo p**N."""
    f = polys.as_poly(f)
    df = polys.derivative(f)
    if polys.evaluate(f, r0, p) != 0:
        raise NotRoot(f"f({r0}) is not 0 mod {p}")
    if polys.evaluate(df, r0, p) == 0:
        raise NotSimpleRoot(f"f'({r0}) is 0 mod {p}")
    r = r0 % p
    k = 1
    while k < N:
        k = min(2 * k, N)
        m = p ** k
        r = (r - polys.evaluate(f, r, m) * pow(polys.evaluate(df, r, m), -1, m)) % m
    return PadicInt(p, N, r)


def pth_power_index_qp(u: PadicInt, max_i: int) -> int:
    """Largest i <= max_i such that u is a p**i-th power in Z_p^x.

    A unit is a p**i-th power iff u**(p-1) == 1 mod p**(i+1).
    """
    if not u.is_unit():
        raise NotUnit(f"{u} is not a unit")
    if u.precision < max_i + 1:
        raise PrecisionTooLow(f"need precision >= {max_i + 1}, have {u.precision}")
    w = u ** (u.p - 1)
    v = _vp_capped(w.residue - 1, u.p, u.precision)
    return min(max_i, v - 1)


def contains_pth_roots_of_unity(q: int, e: int, p: int) -> bool:
    """Whether a local field with residue field F_q and absolute ramification e contains mu_p."""
    if q % p == 0:
        return e >= p - 1
    return q % p == 1


# -- quadratic extensions ---------------------------------------------------


@dataclass(frozen=True)
class LocalQuadField:
    p: int
    d: int
    kind: Literal["ramified", "unramified"]
    e: int
    f: int

    @property
    def uniformizer(self) -> str:
        return f"sqrt({self.d})" if self.kind == "ramified" else str(self.p)

    @property
    def residue_size(self) -> int:
        return self.p ** self.f

    def moduli_exponents(self, prec: int) -> tuple[int, int]:
        """p-adic exponents bounding the (a, b) coordinates of an element known mod m**prec."""
        if self.e == 1:
            return prec, prec
        return (prec + 1) // 2, prec // 2

    def element(self, a: int, b: int, prec: int) -> "LocalQuadElement":
        return LocalQuadElement(self, a, b, prec)

    def one(self, prec: int) -> "LocalQuadElement":
        return LocalQuadElement(self, 1, 0, prec)

    def __str__(self):
        return f"Q_{self.p}(sqrt({self.d})) [{self.kind}]"


def make_quadratic_extension(p: int, d: int) -> LocalQuadField:
    v = vp(d, p)
    if v >= 2:
        raise BadValuation(f"v_{p}({d}) = {v}; divide out squares of {p} first")
    if v == 1:
        return LocalQuadField(p, d, "ramified", 2, 1)
    if is_square_unit_mod_p(d, p):
        raise SquareDiscriminant(f"{d} is a square in Q_{p}")
    return LocalQuadField(p, d, "unramified", 1, 2)


@dataclass(frozen=True)
class LocalQuadElement:
    """a + b*sqrt(d) known modulo m**prec, m the maximal ideal."""

    field: LocalQuadField
    a: int
    b: int
    prec: int
    valuation: float = field(init=False, compare=False)

    def __post_init__(self):
        ka, kb = self.field.moduli_exponents(self.prec)
        p = self.field.p
        object.__setattr__(self, "a", self.a % p ** ka)
        object.__setattr__(self, "b", self.b % p ** kb if kb > 0 else 0)
        object.__setattr__(self, "valuation", self._compute_valuation())

    def _compute_valuation(self) -> float:
        fld, p = self.field, self.field.p
        ka, kb = fld.moduli_exponents(self.prec)
        va = fld.e * _vp_capped(self.a, p, ka)
        vb = fld.e * _vp_capped(self.b, p, kb) + (fld.e - 1) if kb > 0 else self.prec
        v = min(va, vb)
        return INF if v >= self.prec else v

    def _check(self, other: "LocalQuadElement") -> int:
        if other.field != self.field:
            raise ValueError("elements of different fields")
        return min(self.prec, other.prec)

    def __add__(self, other):
        if isinstance(other, int):
            other = LocalQuadElement(self.field, other, 0, self.prec)
        prec = self._check(other)
        return LocalQuadElement(self.field, self.a + other.a, self.b + other.b, prec)

    __radd__ = __add__

    def __neg__(self):
        return LocalQuadElement(self.field, -self.a, -self.b, self.prec)

    def __sub__(self, other):
        if isinstance(other, int):
            other = LocalQuadElement(self.field, other, 0, self.prec)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return LocalQuadElement(self.field, self.a * other, self.b * other, self.prec)
        prec = self._check(other)
        d = self.field.d
        a = self.a * other.a + d * self.b * other.b
        b = self.a * other.b + self.b * other.a
        return LocalQuadElement(self.field, a, b, prec)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "LocalQuadElement":
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = self.field.one(self.prec)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self) -> "LocalQuadElement":
        return LocalQuadElement(self.field, self.a, -self.b, self.prec)

    def is_zero(self) -> bool:
        return self.valuation == INF

    def congruent_one_mod(self, k: int) -> bool:
        """Whether the element is 1 modulo m**k (requires k <= prec)."""
        if k > self.prec:
            raise PrecisionTooLow(f"cannot test modulo m^{k} at precision {self.prec}")
        return (self - 1).valuation >= k

    def reduce(self, prec: int) -> "LocalQuadElement":
        if prec > self.prec:
            raise PrecisionTooLow(f"cannot raise precision {self.prec} to {prec}")
        return LocalQuadElement(self.field, self.a, self.b, prec)

    def __str__(self):
        return f"{self.a} + {self.b}*sqrt({self.field.d}) + O(m^{self.prec})"


def quad_unit_power_index(z: LocalQuadElement, max_i: int) -> int:
    """Largest i <= max_i such that the unit z is a p**i-th power.

    The prime-to-p torsion (Teichmueller) part is killed by raising to q - 1;
    what remains is a 1-unit, and for p > 3, e <= 2 the p-th power map sends
    U_k onto U_{k+e}, so the 1-unit is a p**i-th power iff it lies in U_{1+i*e}.
    """
    fld = z.field
    if z.valuation != 0:
        raise NotUnit(f"{z} is not a unit")
    w = z ** (fld.residue_size - 1)
    v = (w - 1).valuation
    if v == INF:
        if z.prec < 1 + max_i * fld.e:
            raise PrecisionTooLow(
                f"need m-precision >= {1 + max_i * fld.e} to decide index up to {max_i}")
        return max_i
    return min(max_i, (int(v) - 1) // fld.e)


def _lift_sqrt(u: int, p: int, N: int) -> int:
    """sqrt of the square unit u in Z_p, modulo p**N."""
    from sympy.ntheory import sqrt_mod

    r = sqrt_mod(u % p, p)
    if r is None:
        raise SquareDiscriminant(f"{u} is not a square mod {p}")
    r = int(r)
    k = 1
    while k < N:
        k = min(2 * k, N)
        m = p ** k
        r = (r - (r * r - u) * pow(2 * r, -1, m)) % m
    return r


def _first_digit(n: int, p: int, k: int) -> int:
    """Leading nonzero p-adic digit of n modulo p**k (0 when n is 0 there)."""
    n %= p ** k
    if n == 0:
        return 0
    while n % p == 0:
        n //= p
    return n % p


def _simple_root_factorizations(f, p, W):
    """Yield (r, B, C, disc) for Z_p-roots r lifted from simple roots mod p, with
    f = (x - r)(x^2 + B x + C) modulo p**W."""
    _, c2, c1, _ = polys.monic_cubic(f)
    m = p ** W
    for r0, mult in polys.roots_mod(f, p):
        if mult != 1:
            continue
        r = hensel_lift_root(f, p, r0, W).residue
        B = (c2 + r) % m
        C = (c1 + r * B) % m
        yield r, B, C, (B * B - 4 * C) % m


def _quadratic_class(disc: int, p: int, W: int):
    """Classify the quadratic x^2 + Bx + C over Q_p through its discriminant mod p**W.

    Returns None when it is a square (splits), else (k, unit) with disc = p**k * unit.
    """
    if disc % p ** W == 0:
        raise PrecisionTooLow("quadratic discriminant vanishes to working precision")
    k = int(vp(disc, p))
    unit = disc // p ** k
    if k % 2 == 0 and is_square_unit_mod_p(unit, p):
        return None
    return k, unit


def quadratic_factor_field(f: Sequence[int], p: int) -> LocalQuadField:
    """The field Q_p(sqrt d) cut out by the irreducible quadratic factor of f over Q_p."""
    W = 8
    while True:
        try:
            for r, B, C, disc in _simple_root_factorizations(f, p, W):
                cls = _quadratic_class(disc, p, W)
                if cls is None:
                    continue
                k, unit = cls
                if k % 2 == 1:
                    return make_quadratic_extension(p, p * _smallest_rep(unit, p))
                return make_quadratic_extension(p, _smallest_rep(unit, p))
            raise NoQuadraticFactor(f"{f} has no (linear)(irreducible quadratic) factorization over Q_{p}")
        except PrecisionTooLow:
            W *= 2
            if W > 256:
                raise


def _smallest_rep(unit: int, p: int) -> int:
    """Smallest |d0| with d0 in the same square class of units as ``unit``."""
    want = is_square_unit_mod_p(unit, p)
    for n in range(1, 4 * p):
        for cand in (n, -n):
            if cand % p and is_square_unit_mod_p(cand, p) == want:
                return cand
    raise AssertionError("unreachable")


def quad_embed_cubic_roots(
    f: Sequence[int], fld: LocalQuadField, prec: int
) -> tuple[LocalQuadElement, LocalQuadElement]:
    """Both roots of f lying in ``fld`` but not in Q_p, canonical one first.

    The canonical root has the leading p-adic digit of its sqrt(d)-coordinate
    in [1, (p-1)/2].
    """
    p = fld.p
    vd = int(vp(fld.d, p))
    d0 = fld.d // p ** vd
    ka, kb = fld.moduli_exponents(prec)
    target = max(ka, kb) + 1
    W = target + 8
    found_any = False
    for _ in range(6):
        try:
            for r, B, C, disc in _simple_root_factorizations(f, p, W):
                cls = _quadratic_class(disc, p, W)
                if cls is None:
                    continue
                found_any = True
                k, unit = cls
                if (k - vd) % 2 or not is_square_unit_mod_p(unit * pow(d0, -1, p), p):
                    raise WrongField(f"quadratic factor of {f} does not split in {fld}")
                if W < target + k + 2:
                    raise PrecisionTooLow("retry")
                s = _lift_sqrt(unit * pow(d0, -1, p ** W), p, W - k)
                half = pow(2, -1, p ** W)
                a = (-B * half) % p ** W
                b = (s * p ** ((k - vd) // 2) * half) % p ** W
                plus = LocalQuadElement(fld, a, b, prec)
                minus = LocalQuadElement(fld, a, -b, prec)
                lead = _first_digit(plus.b, p, kb) if kb > 0 else 0
                if lead > (p - 1) // 2:
                    plus, minus = minus, plus
                return plus, minus
            break
        except PrecisionTooLow:
            W = 2 * W + 8
    if found_any:
        raise PrecisionTooLow("could not resolve the quadratic factor")
    raise NoQuadraticFactor(f"{f} has no (linear)(irreducible quadratic) factorization over Q_{p}")


def quad_embed_cubic_root(f: Sequence[int], fld: LocalQuadField, prec: int) -> LocalQuadElement:
    return quad_embed_cubic_roots(f, fld, prec)[0]
