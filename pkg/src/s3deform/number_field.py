"""Cubic fields K = Q[x]/(f): invariants, maximal order, prime splitting,
fundamental units and class-number checks.

Elements of K are handled in two coordinate systems: rational coordinates
on the power basis {1, x, x^2}, and integer coordinates on the integral
basis of the maximal order.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Sequence

import mpmath
import sympy
from sympy import Poly as SymPoly
from sympy import Symbol
from sympy.polys.numberfields.basis import round_two

from . import polys
from .errors import (
    BoundTooLarge,
    IndexDivisor,
    NotFundamental,
    NotTotallyComplex,
    Reducible,
    SearchExhausted,
)
from .linalg import RowHNF, det3, hnf, in_lattice, inverse3, vec_mat

log = logging.getLogger(__name__)

Vec = tuple[Fraction, Fraction, Fraction]

DEFAULT_HEIGHT_BOUND = 10 ** 6
DEFAULT_MINKOWSKI_CEILING = 5000.0


# -- arithmetic on the power basis -------------------------------------------


def pmul(f: Sequence[int], u: Sequence, v: Sequence) -> tuple:
    """Product of two elements given on the power basis, reduced modulo monic cubic f."""
    _, c2, c1, c0 = f
    prod = [0] * 5
    for i in range(3):
        for j in range(3):
            prod[i + j] += u[i] * v[j]
    # x^3 = -c2 x^2 - c1 x - c0
    for k in (4, 3):
        t = prod[k]
        if t:
            prod[k] = 0
            prod[k - 1] -= c2 * t
            prod[k - 2] -= c1 * t
            prod[k - 3] -= c0 * t
    return tuple(prod[:3])


def mult_matrix(f: Sequence[int], u: Sequence) -> list[list]:
    """Matrix (rows indexed by output coordinate) of multiplication by u on the power basis."""
    cols = [pmul(f, u, e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    return [[cols[j][i] for j in range(3)] for i in range(3)]


def norm(f: Sequence[int], u: Sequence) -> Fraction:
    return Fraction(det3(mult_matrix(f, u)))


def charpoly(f: Sequence[int], u: Sequence) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    m = mult_matrix(f, u)
    tr = m[0][0] + m[1][1] + m[2][2]
    s2 = (m[0][0] * m[1][1] - m[0][1] * m[1][0]
          + m[0][0] * m[2][2] - m[0][2] * m[2][0]
          + m[1][1] * m[2][2] - m[1][2] * m[2][1])
    return (Fraction(1), Fraction(-tr), Fraction(s2), Fraction(-det3(m)))


def pinverse(f: Sequence[int], u: Sequence) -> tuple:
    inv = inverse3(mult_matrix(f, u))
    return tuple(inv[i][0] for i in range(3))


def ppow(f: Sequence[int], u: Sequence, k: int) -> tuple:
    if k < 0:
        return ppow(f, pinverse(f, u), -k)
    result: tuple = (Fraction(1), Fraction(0), Fraction(0))
    base = tuple(Fraction(c) for c in u)
    while k:
        if k & 1:
            result = pmul(f, result, base)
        base = pmul(f, base, base)
        k >>= 1
    return result


def is_integral(f: Sequence[int], u: Sequence) -> bool:
    return all(c.denominator == 1 for c in charpoly(f, u))


def format_element(u: Sequence) -> str:
    terms = []
    for c, mono in zip(u, ("", "x", "x^2")):
        c = Fraction(c)
        if c == 0:
            continue
        mag = abs(c)
        coef = "" if (mag == 1 and mono) else str(mag)
        body = f"{coef}{mono}" if mono else coef
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


# -- field data ------------------------------------------------------------


@dataclass(frozen=True)
class CubicFieldData:
    f: tuple[int, int, int, int]
    poly_disc: int
    signature: tuple[int, int]
    field_disc: int | None = None
    index: int | None = None
    integral_basis: tuple[Vec, Vec, Vec] | None = None
    dedekind: dict | None = field(default=None, compare=False)

    @property
    def has_basis(self) -> bool:
        return self.integral_basis is not None

    def describe(self) -> str:
        return polys.to_str(self.f)

    @cached_property
    def basis_inverse(self) -> list[list[Fraction]]:
        return inverse3([list(row) for row in self.integral_basis])

    def to_power(self, c: Sequence[int]) -> tuple:
        return tuple(vec_mat(list(c), [list(r) for r in self.integral_basis]))

    def to_integral(self, u: Sequence) -> tuple[int, ...]:
        coords = vec_mat(list(u), self.basis_inverse)
        if any(Fraction(c).denominator != 1 for c in coords):
            raise ValueError(f"{u} is not in the maximal order")
        return tuple(int(c) for c in coords)

    @cached_property
    def mult_table(self) -> list[list[tuple[int, ...]]]:
        """Integral-basis coordinates of w_i * w_j."""
        B = self.integral_basis
        return [[self.to_integral(pmul(self.f, B[i], B[j])) for j in range(3)] for i in range(3)]

    def imul(self, u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
        T = self.mult_table
        out = [0, 0, 0]
        for i in range(3):
            if u[i]:
                for j in range(3):
                    if v[j]:
                        c = u[i] * v[j]
                        t = T[i][j]
                        out[0] += c * t[0]
                        out[1] += c * t[1]
                        out[2] += c * t[2]
        return tuple(out)

    def inorm(self, u: Sequence[int]) -> int:
        cols = [self.imul(u, e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
        return int(det3([[cols[j][i] for j in range(3)] for i in range(3)]))

    @cached_property
    def minkowski_bound(self) -> float:
        r1, r2 = self.signature
        return (6 / 27) * (4 / math.pi) ** r2 * math.sqrt(abs(self.field_disc))


def cubic_invariants(f: Sequence[int]) -> CubicFieldData:
    f = polys.monic_cubic(f)
    roots = polys.rational_roots_monic(f)
    if roots:
        raise Reducible(f"{polys_str(f)} has the rational root {roots[0]}")
    disc = polys.cubic_discriminant(f)
    signature = (3, 0) if disc > 0 else (1, 1)
    return CubicFieldData(f=f, poly_disc=disc, signature=signature)


def polys_str(f: Sequence[int]) -> str:
    return polys.to_str(f)


def dedekind_test(f: Sequence[int], q: int) -> int:
    """Dedekind's criterion at q for Z[x], x a root of f.

    Returns deg gcd(F, g, h) mod q; Z[x] is q-maximal iff this is 0, and the
    one-step enlargement has index q**(returned value).
    """
    factors = polys.factor_mod(f, q)
    g: tuple = (1,)
    h: tuple = (1,)
    for fac, e in factors:
        g = polys.mul(g, fac)
        for _ in range(e - 1):
            h = polys.mul(h, fac)
    gh = polys.mul(g, h)
    diff = [a - b for a, b in zip(_pad(f, len(gh)), _pad(gh, len(f)))]
    F = tuple(c // q for c in diff)
    assert all(c % q == 0 for c in diff)
    hbar = h if len(h) > 1 else None
    if hbar is None:
        return 0
    z = polys.gcd_mod(polys.gcd_mod(F, g, q), h, q)
    return len(z) - 1 if any(z) else len(g) - 1


def _pad(f: Sequence[int], n: int) -> list[int]:
    f = list(f)
    return [0] * (n - len(f)) + f


def maximal_order_basis(f: Sequence[int]) -> CubicFieldData:
    """Complete the field data with an integral basis and the field discriminant.

    The basis comes from sympy's Round Two; Dedekind's criterion is evaluated
    independently at every q with q^2 | disc(f) and must agree on which
    primes divide the index.
    """
    K = cubic_invariants(f)
    x = Symbol("x")
    T = SymPoly(list(K.f), x, domain="ZZ")
    ZK, dK = round_two(T)
    M = ZK.matrix.to_Matrix()
    den = int(ZK.denom)
    basis = tuple(
        tuple(Fraction(int(M[i, j]), den) for i in range(3)) for j in range(3)
    )
    index = int(abs(1 / Fraction(det3(basis))))
    field_disc = int(dK)
    if K.poly_disc != index * index * field_disc:
        raise AssertionError("poly_disc != index^2 * field_disc")
    dedekind = {}
    for q, e in sympy.factorint(abs(K.poly_disc)).items():
        if e >= 2:
            deg = dedekind_test(K.f, int(q))
            dedekind[int(q)] = deg
            if (deg > 0) != (index % q == 0):
                raise AssertionError(f"Dedekind's criterion disagrees with the basis at {q}")
    return CubicFieldData(
        f=K.f,
        poly_disc=K.poly_disc,
        signature=K.signature,
        field_disc=field_disc,
        index=index,
        integral_basis=basis,
        dedekind=dedekind,
    )


# -- prime ideals ------------------------------------------------------------


@dataclass(frozen=True)
class PrimeIdeal:
    q: int
    e: int
    f: int
    hnf: tuple[tuple[int, ...], ...]
    root: int | None = None  # x == root mod P, when P has degree 1 and q does not divide the index

    @property
    def norm(self) -> int:
        return self.q ** self.f

    def label(self) -> str:
        return f"P({self.q}; e={self.e}, f={self.f})"


@dataclass(frozen=True)
class SplittingType:
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if sum(e * f for e, f in self.pairs) != 3:
            raise ValueError(f"invalid splitting type {self.pairs}")

    def as_list(self) -> list[list[int]]:
        return [list(t) for t in self.pairs]

    def __eq__(self, other):
        if isinstance(other, SplittingType):
            return self.pairs == other.pairs
        return self.pairs == tuple(tuple(t) for t in other)

    def __hash__(self):
        return hash(self.pairs)


def _splitting(pairs) -> SplittingType:
    return SplittingType(tuple(sorted((tuple(t) for t in pairs), reverse=True)))


def _ideal_from_generators(K: CubicFieldData, q: int, gens: Sequence[Sequence[int]]):
    vecs = [tuple(q if i == j else 0 for j in range(3)) for i in range(3)]
    for g in gens:
        for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
            vecs.append(K.imul(g, e))
    return tuple(tuple(r) for r in hnf(vecs, 3))


def _theta_index(K: CubicFieldData, theta_int: Sequence[int]) -> tuple[tuple[int, ...], int] | None:
    cp = charpoly(K.f, K.to_power(theta_int))
    g = tuple(int(c) for c in cp)
    d = polys.cubic_discriminant(g)
    if d == 0:
        return None
    idx2 = Fraction(d, K.field_disc)
    return g, math.isqrt(int(idx2))


def _elem_poly(K: CubicFieldData, g: Sequence[int], theta_int: Sequence[int]) -> tuple[int, ...]:
    """Integral coordinates of g(theta)."""
    acc = (0, 0, 0)
    for c in g:
        acc = K.imul(acc, theta_int)
        acc = (acc[0] + c, acc[1], acc[2])
    return acc


def primes_above(K: CubicFieldData, q: int, allow_index_divisor: bool = True) -> list[PrimeIdeal]:
    """The prime ideals of the maximal order lying above q."""
    x_int = K.to_integral((0, 1, 0))
    if K.index % q:
        gen_poly, theta = K.f, x_int
    else:
        if not allow_index_divisor:
            raise IndexDivisor(f"{q} divides the index [O_K : Z[x]]")
        gen_poly, theta = None, None
        for c in product(range(-2, 3), repeat=3):
            if c == (0, 0, 0):
                continue
            got = _theta_index(K, c)
            if got and got[1] % q:
                gen_poly, theta = got[0], c
                break
        if gen_poly is None:
            return _primes_by_homomorphisms(K, q)
    out = []
    for fac, e in polys.factor_mod(gen_poly, q):
        gen = _elem_poly(K, fac, theta)
        H = _ideal_from_generators(K, q, [gen])
        deg = len(fac) - 1
        root = (-fac[1]) % q if deg == 1 and theta == x_int else None
        out.append(PrimeIdeal(q=q, e=e, f=deg, hnf=H, root=root))
    return out


def _primes_by_homomorphisms(K: CubicFieldData, q: int) -> list[PrimeIdeal]:
    """Degree-one primes above a common index divisor, as kernels of ring maps O_K -> F_q."""
    one = K.to_integral((1, 0, 0))
    T = K.mult_table
    out = []
    for img in product(range(q), repeat=3):
        if sum(a * b for a, b in zip(one, img)) % q != 1:
            continue
        ok = all(
            sum(T[i][j][k] * img[k] for k in range(3)) % q == img[i] * img[j] % q
            for i in range(3) for j in range(3)
        )
        if not ok:
            continue
        # kernel: vectors c with sum c_k img_k == 0 mod q
        vecs = [tuple(q if i == j else 0 for j in range(3)) for i in range(3)]
        for k in range(3):
            v = [0, 0, 0]
            v[k] = 1
            vecs.append(tuple(v[i] - img[k] * one[i] * pow(sum(one[t] * img[t] for t in range(3)), -1, q)
                              for i in range(3)))
        H = tuple(tuple(r) for r in hnf(vecs, 3))
        out.append(PrimeIdeal(q=q, e=1, f=1, hnf=H))
    if sum(P.f * P.e for P in out) != 3:
        raise IndexDivisor(f"could not determine the primes above the index divisor {q}")
    return out


def prime_splitting_type(K: CubicFieldData, q: int, allow_index_divisor: bool = False) -> SplittingType:
    """Factorization type [(e, f), ...] of q in K."""
    if not K.has_basis:
        K = maximal_order_basis(K.f)
    if K.index % q == 0:
        if not allow_index_divisor:
            raise IndexDivisor(f"{q} divides the index; pass allow_index_divisor=True")
        return _splitting((P.e, P.f) for P in primes_above(K, q))
    return _splitting((e, len(fac) - 1) for fac, e in polys.factor_mod(K.f, q))


class _Valuations:
    """Valuations at prime ideals, via membership in cached ideal powers."""

    def __init__(self, K: CubicFieldData):
        self.K = K
        self._powers: dict[PrimeIdeal, list] = {}

    def _power(self, P: PrimeIdeal, k: int):
        pw = self._powers.setdefault(P, [((1, 0, 0), (0, 1, 0), (0, 0, 1)), P.hnf])
        while len(pw) <= k:
            A, B = pw[-1], P.hnf
            vecs = [self.K.imul(a, b) for a in A for b in B]
            pw.append(tuple(tuple(r) for r in hnf(vecs, 3)))
        return pw[k]

    def valuation(self, P: PrimeIdeal, alpha: Sequence[int], bound: int) -> int:
        k = 0
        while k < bound and in_lattice(self._power(P, k + 1), alpha):
            k += 1
        return k


# -- embeddings, units -------------------------------------------------------


def _embeddings(K: CubicFieldData, dps: int):
    with mpmath.workdps(dps + 10):
        roots = mpmath.polyroots([mpmath.mpf(c) for c in K.f], maxsteps=200, extraprec=4 * dps)
    real = [r for r in roots if abs(mpmath.im(r)) < mpmath.mpf(10) ** (-dps // 2)]
    cplx = [r for r in roots if mpmath.im(r) > mpmath.mpf(10) ** (-dps // 2)]
    return real, cplx


def _eval_power(u: Sequence, z):
    return mpmath.mpf(u[0].numerator) / u[0].denominator + \
        (mpmath.mpf(u[1].numerator) / u[1].denominator) * z + \
        (mpmath.mpf(u[2].numerator) / u[2].denominator) * z * z


@dataclass(frozen=True)
class UnitElement:
    coords: tuple[Fraction, Fraction, Fraction]  # on {1, x, x^2}
    norm: int
    real_value: float
    certified: bool
    checks: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def regulator(self) -> float:
        return abs(math.log(abs(self.real_value)))

    def __str__(self) -> str:
        return format_element(self.coords)


def _normalize_sign(u: Sequence) -> tuple:
    lead = next(c for c in reversed(u) if c != 0)
    return tuple(Fraction(c) for c in u) if lead > 0 else tuple(-Fraction(c) for c in u)


def normalize_unit(K: CubicFieldData, u: Sequence) -> tuple:
    """Representative of {+-u, +-u^-1} with real absolute value > 1 and positive leading coordinate."""
    real, _ = _embeddings(K, 30)
    rho = real[0]
    val = _eval_power([Fraction(c) for c in u], rho)
    if abs(val) < 1:
        u = pinverse(K.f, u)
    return _normalize_sign(u)


def _fincke_pohst(A: "mpmath.matrix", bound):
    """All integer vectors c != 0 with |A c|^2 <= bound (A is 3x3, columns a basis)."""
    G = A.T * A
    n = 3
    # Cholesky-style decomposition Q(c) = sum_i qd[i] * (c_i + sum_{j>i} mu[i][j] c_j)^2
    Q = [[G[i, j] for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            Q[j][i] = Q[i][j]
            Q[i][j] = Q[i][j] / Q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                Q[k][l] = Q[k][l] - Q[k][i] * Q[i][l]
    qd = [Q[i][i] for i in range(n)]
    mu = [[Q[i][j] if j > i else 0 for j in range(n)] for i in range(n)]
    out = []
    c = [0] * n

    def rec(i, remaining):
        centre = -sum(mu[i][j] * c[j] for j in range(i + 1, n))
        if remaining < 0:
            return
        r = mpmath.sqrt(remaining / qd[i])
        lo = int(mpmath.ceil(centre - r))
        hi = int(mpmath.floor(centre + r))
        for v in range(lo, hi + 1):
            c[i] = v
            rem = remaining - qd[i] * (v - centre) ** 2
            if i == 0:
                if any(c):
                    out.append(tuple(c))
            else:
                rec(i - 1, rem)
        c[i] = 0

    rec(n - 1, bound)
    return out


def _lll(A: "mpmath.matrix"):
    """LLL-reduce the columns of a 3x3 real matrix; returns (reduced, integer transform)."""
    n = 3
    B = [[A[i, j] for i in range(n)] for j in range(n)]  # list of column vectors
    U = [[1 if i == j else 0 for i in range(n)] for j in range(n)]

    def dot(u, v):
        return sum(a * b for a, b in zip(u, v))

    def gso():
        Bs, mu = [], [[0] * n for _ in range(n)]
        for i in range(n):
            v = list(B[i])
            for j in range(i):
                mu[i][j] = dot(B[i], Bs[j]) / dot(Bs[j], Bs[j])
                v = [a - mu[i][j] * b for a, b in zip(v, Bs[j])]
            Bs.append(v)
        return Bs, mu

    k = 1
    Bs, mu = gso()
    while k < n:
        for j in range(k - 1, -1, -1):
            r = int(mpmath.nint(mu[k][j]))
            if r:
                B[k] = [a - r * b for a, b in zip(B[k], B[j])]
                U[k] = [a - r * b for a, b in zip(U[k], U[j])]
                Bs, mu = gso()
        if dot(Bs[k], Bs[k]) >= (mpmath.mpf(3) / 4 - mu[k][k - 1] ** 2) * dot(Bs[k - 1], Bs[k - 1]):
            k += 1
        else:
            B[k], B[k - 1] = B[k - 1], B[k]
            U[k], U[k - 1] = U[k - 1], U[k]
            Bs, mu = gso()
            k = max(k - 1, 1)
    R = mpmath.matrix(n, n)
    for j in range(n):
        for i in range(n):
            R[i, j] = B[j][i]
    return R, U


def _is_kth_power(K: CubicFieldData, u: tuple, k: int, rho, z, Minv) -> bool:
    """Numerically look for beta with beta^k = u, confirming any hit exactly."""
    s1 = _eval_power(u, rho)
    s2 = _eval_power(u, z)
    if k % 2 == 0 and s1 < 0:
        return False
    r1 = mpmath.sign(s1) * abs(s1) ** (mpmath.mpf(1) / k)
    for t in range(k):
        r2 = mpmath.root(s2, k, t)
        v = [r1, mpmath.re(r2), mpmath.im(r2)]
        c = [sum(Minv[i, j] * v[j] for j in range(3)) for i in range(3)]
        ci = [int(mpmath.nint(x)) for x in c]
        if max(abs(x - y) for x, y in zip(c, ci)) > mpmath.mpf("1e-6"):
            continue
        beta = K.to_power(ci)
        if ppow(K.f, beta, k) == tuple(Fraction(x) for x in u):
            return True
    return False


def find_fundamental_unit(K: CubicFieldData, height_bound: int = DEFAULT_HEIGHT_BOUND,
                          dps: int = 50) -> UnitElement:
    """Smallest unit > 1 of a complex cubic field, by exhaustive lattice enumeration.

    Units with real embedding E in (E_lo, E_hi] satisfy |sigma_2| = E^(-1/2), so
    they lie in a box whose volume is bounded independently of E; each dyadic
    bracket is enumerated exhaustively (LLL + Fincke-Pohst), so the first
    bracket containing a nontrivial unit yields the fundamental unit.
    """
    if not K.has_basis:
        K = maximal_order_basis(K.f)
    if K.signature != (1, 1):
        raise NotTotallyComplex("unit search needs signature (1, 1)")
    with mpmath.workdps(dps):
        real, cplx = _embeddings(K, dps)
        rho, z = real[0], cplx[0]
        B = K.integral_basis
        s1 = [_eval_power(b, rho) for b in B]
        s2 = [_eval_power(b, z) for b in B]
        M = mpmath.matrix([[s1[j] for j in range(3)],
                           [mpmath.re(s2[j]) for j in range(3)],
                           [mpmath.im(s2[j]) for j in range(3)]])
        Minv = M ** -1
        kappa = max(abs(Minv[i, 0]) for i in range(3))
        slack = max(abs(Minv[i, 1]) + abs(Minv[i, 2]) for i in range(3))
        E_lo = mpmath.mpf(1)
        tol = mpmath.mpf(10) ** (-dps // 2)
        bracket = 0
        while True:
            if E_lo * kappa - slack > height_bound:
                raise SearchExhausted(f"no unit with coordinates below {height_bound}")
            E_hi = 2 * E_lo
            A = mpmath.matrix(3, 3)
            for j in range(3):
                A[0, j] = s1[j] / E_hi
                A[1, j] = mpmath.re(s2[j]) * mpmath.sqrt(E_lo)
                A[2, j] = mpmath.im(s2[j]) * mpmath.sqrt(E_lo)
            R, U = _lll(A)
            found = []
            for y in _fincke_pohst(R, 2 * (1 + tol)):
                c = tuple(sum(U[k][i] * y[k] for k in range(3)) for i in range(3))
                val = sum(s1[j] * c[j] for j in range(3))
                if abs(val) <= 1 + tol:
                    continue
                if abs(K.inorm(c)) == 1:
                    found.append((abs(val), c))
            bracket += 1
            if found:
                found.sort()
                _, c = found[0]
                u = _normalize_sign(K.to_power(c))
                value = _eval_power(u, rho)
                checks = {f"not_{k}th_power": not _is_kth_power(K, u, k, rho, z, Minv)
                          for k in (2, 3, 5, 7)}
                # |d| < 4 eps^3 + 24 for complex cubic fields
                checks["discriminant_unit_inequality"] = abs(K.field_disc) < 4 * value ** 3 + 24
                checks["brackets_enumerated"] = bracket
                certified = all(v for k_, v in checks.items() if k_.startswith("not_"))
                return UnitElement(
                    coords=u,
                    norm=int(norm(K.f, u)),
                    real_value=float(value),
                    certified=certified,
                    checks=checks,
                )
            E_lo = E_hi


def unit_search_bruteforce(K: CubicFieldData, box: int) -> tuple | None:
    """Reference oracle: the unit with minimal |log|sigma_1|| > 0 among integral
    coordinates bounded by ``box``, normalized like find_fundamental_unit."""
    if not K.has_basis:
        K = maximal_order_basis(K.f)
    real, _ = _embeddings(K, 30)
    rho = float(real[0])
    Bf = [[float(x) for x in b] for b in K.integral_basis]
    s1 = [b[0] + b[1] * rho + b[2] * rho * rho for b in Bf]
    best = None
    for c in product(range(-box, box + 1), repeat=3):
        val = abs(sum(a * b for a, b in zip(c, s1)))
        if val == 0 or abs(math.log(val)) < 1e-9:
            continue
        lv = abs(math.log(val))
        if best is not None and lv >= best[0] - 1e-12:
            continue
        if abs(K.inorm(c)) == 1:
            best = (lv, c)
    if best is None:
        return None
    return normalize_unit(K, K.to_power(best[1]))


# -- class numbers -------------------------------------------------------------


def is_fundamental_discriminant(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return sympy.ntheory.factor_.core(abs(d)) == abs(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and sympy.ntheory.factor_.core(abs(m)) == abs(m)
    return False


def fundamental_discriminant(d: int) -> int:
    """The fundamental discriminant of Q(sqrt d)."""
    sign = -1 if d < 0 else 1
    core = sympy.ntheory.factor_.core(abs(d)) * sign
    return core if core % 4 == 1 else 4 * core


def imaginary_quadratic_class_number(disc: int, reduce: bool = False) -> int:
    """Class number of the imaginary quadratic order of fundamental discriminant ``disc``,
    counting reduced forms (a, b, c) with |b| <= a <= c, b >= 0 on the boundary."""
    if reduce:
        disc = fundamental_discriminant(disc)
    if disc >= 0 or not is_fundamental_discriminant(disc):
        raise NotFundamental(f"{disc} is not a negative fundamental discriminant")
    D = -disc
    h = 0
    a = 1
    while 3 * a * a <= D:
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            num = b * b + D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            h += 1
        a += 1
    return h


@dataclass
class ClassGroupEvidence:
    """Relation-lattice data for Cl(K): h_K divides ``multiple_of_h``."""

    minkowski_bound: float
    factor_base: list[str]
    relations: int
    multiple_of_h: int | None
    prime_to: int | None = None
    stable_rounds: int = 0

    def prime_to_p(self, p: int) -> bool:
        return self.multiple_of_h is not None and self.multiple_of_h % p != 0


def class_group_evidence(K: CubicFieldData, p: int | None = None,
                         ceiling: float = DEFAULT_MINKOWSKI_CEILING,
                         max_b: int = 400, stable_target: int = 40) -> ClassGroupEvidence:
    """Collect principal-ideal relations over the primes of norm up to the Minkowski bound.

    Every relation is an exponent vector of a principal ideal, so the
    determinant of the relation lattice is a multiple of h_K.  Enumeration
    stops once that determinant is prime to ``p`` (if given) or has been
    stable for ``stable_target`` consecutive relations after full rank.
    """
    if not K.has_basis:
        K = maximal_order_basis(K.f)
    M = K.minkowski_bound
    if M > ceiling:
        raise BoundTooLarge(f"Minkowski bound {M:.1f} exceeds ceiling {ceiling}")
    qs = [int(q) for q in sympy.primerange(2, int(M) + 1)]
    fb: list[PrimeIdeal] = []
    for q in qs:
        fb.extend(primes_above(K, q))
    n = len(fb)
    ev = ClassGroupEvidence(minkowski_bound=M, factor_base=[P.label() for P in fb],
                            relations=0, multiple_of_h=1 if n == 0 else None, prime_to=p)
    if n == 0:
        return ev
    lat = RowHNF(n)
    pos = {P: i for i, P in enumerate(fb)}
    # free relations (q) = prod P^e
    for q in qs:
        v = [0] * n
        for P in fb:
            if P.q == q:
                v[pos[P]] = P.e
        lat.add(v)
        ev.relations += 1
    by_root: dict[tuple[int, int], PrimeIdeal] = {}
    for P in fb:
        if P.root is not None:
            by_root[(P.q, P.root)] = P
    vals = _Valuations(K)
    _, c2, c1, c0 = K.f
    x_int = K.to_integral((0, 1, 0))
    one_int = K.to_integral((1, 0, 0))
    last_det = None
    stable = 0

    def done() -> bool:
        D = lat.determinant()
        if D is None:
            return False
        if p is not None and D % p:
            return True
        return stable >= stable_target

    roots = {q: [r for r, _ in polys.roots_mod(K.f, q)] for q in qs}
    A = max(60, int(3 * M))
    width = 2 * A + 1
    for b in range(1, max_b + 1):
        norms = [(a ** 3 + c2 * a * a * b + c1 * a * b * b + c0 * b ** 3) for a in range(-A, A + 1)]
        rest = [abs(x) for x in norms]
        expo: list[dict[int, int]] = [dict() for _ in range(width)]
        for q in qs:
            if b % q == 0:
                continue
            for r in roots[q]:
                start = (b * r + A) % q
                for idx in range(start, width, q):
                    x = rest[idx]
                    if x == 0:
                        continue
                    k = 0
                    while x % q == 0:
                        x //= q
                        k += 1
                    rest[idx] = x
                    expo[idx][q] = k
        for idx in range(width):
            if rest[idx] != 1:
                continue
            a = idx - A
            if math.gcd(a, b) != 1:
                continue
            v = [0] * n
            alpha = tuple(a * one_int[i] - b * x_int[i] for i in range(3))
            ok = True
            for q, k in expo[idx].items():
                if K.index % q:
                    P = by_root.get((q, a * pow(b, -1, q) % q))
                    if P is None:
                        ok = False
                        break
                    v[pos[P]] += k
                else:
                    tot = 0
                    for P in fb:
                        if P.q == q:
                            vv = vals.valuation(P, alpha, k // P.f)
                            v[pos[P]] += vv
                            tot += vv * P.f
                    if tot != k:
                        ok = False
                        break
            if not ok:
                continue
            lat.add(v)
            ev.relations += 1
            D = lat.determinant()
            if D is not None:
                stable = stable + 1 if D == last_det else 0
                last_det = D
            if done():
                ev.multiple_of_h = lat.determinant()
                ev.stable_rounds = stable
                return ev
    ev.multiple_of_h = lat.determinant()
    ev.stable_rounds = stable
    return ev


def cubic_class_number_prime_to_p(K: CubicFieldData, p: int,
                                  ceiling: float = DEFAULT_MINKOWSKI_CEILING) -> bool:
    """True iff the relation lattice certifies p does not divide h_K."""
    if not K.has_basis:
        K = maximal_order_basis(K.f)
    return class_group_evidence(K, p, ceiling=ceiling).prime_to_p(p)
