"""Small integer-polynomial helpers.

Polynomials are coefficient sequences ordered from the leading term down,
so ``(1, 0, 7, -12)`` is x^3 + 7x - 12.  Factorization over F_q is delegated
to sympy's Galois-field routines.
"""
from __future__ import annotations

from typing import Sequence

from sympy import ZZ
from sympy.polys import galoistools as gt

Poly = tuple[int, ...]


def as_poly(f: Sequence[int]) -> Poly:
    f = tuple(int(c) for c in f)
    i = 0
    while i < len(f) - 1 and f[i] == 0:
        i += 1
    return f[i:]


def monic_cubic(coeffs: Sequence[int]) -> Poly:
    """Accept (c2, c1, c0) or (1, c2, c1, c0) and return the 4-tuple form."""
    c = tuple(int(x) for x in coeffs)
    if len(c) == 3:
        return (1,) + c
    if len(c) == 4 and c[0] == 1:
        return c
    raise ValueError(f"expected a monic cubic, got coefficients {coeffs!r}")


def evaluate(f: Sequence[int], x, mod: int | None = None):
    acc = 0
    for c in f:
        acc = acc * x + c
        if mod is not None:
            acc %= mod
    return acc


def derivative(f: Sequence[int]) -> Poly:
    n = len(f) - 1
    if n == 0:
        return (0,)
    return tuple(c * (n - i) for i, c in enumerate(f[:-1]))


def shift(f: Sequence[int], c: int) -> Poly:
    """Coefficients of f(x - c), i.e. the polynomial whose roots are shifted by +c."""
    out = [0]
    for coeff in f:
        # out = out * (x - c) + coeff
        nxt = out + [0]
        for i in range(len(out)):
            nxt[i + 1] -= c * out[i]
        nxt[-1] += coeff
        out = nxt
    return as_poly(out)


def cubic_discriminant(f: Sequence[int]) -> int:
    _, b, c, d = monic_cubic(f)
    return b * b * c * c - 4 * c ** 3 - 4 * b ** 3 * d - 27 * d * d + 18 * b * c * d


def factor_mod(f: Sequence[int], q: int) -> list[tuple[Poly, int]]:
    """Irreducible factorization of f over F_q as sorted (monic factor, multiplicity) pairs."""
    g = gt.gf_from_int_poly([int(c) for c in f], q)
    _, factors = gt.gf_factor(g, q, ZZ)
    out = [(tuple(int(c) % q for c in h), e) for h, e in factors]
    out.sort(key=lambda t: (len(t[0]), t[0], t[1]))
    return out


def roots_mod(f: Sequence[int], q: int) -> list[tuple[int, int]]:
    """Roots of f in F_q with their multiplicities, ascending."""
    roots = []
    for h, e in factor_mod(f, q):
        if len(h) == 2:
            roots.append(((-h[1]) % q, e))
    return sorted(roots)


def gcd_mod(f: Sequence[int], g: Sequence[int], q: int) -> Poly:
    a = gt.gf_from_int_poly([int(c) for c in f], q)
    b = gt.gf_from_int_poly([int(c) for c in g], q)
    return tuple(int(c) for c in gt.gf_gcd(a, b, q, ZZ))


def mul(f: Sequence[int], g: Sequence[int]) -> Poly:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] += a * b
    return as_poly(out)


def rational_roots_monic(f: Sequence[int]) -> list[int]:
    """Integer roots of a monic integer polynomial (they divide the constant term)."""
    f = as_poly(f)
    c0 = f[-1]
    if c0 == 0:
        return sorted({0} | set(rational_roots_monic(f[:-1]) if len(f) > 2 else []))
    roots = []
    n = abs(c0)
    d = 1
    while d * d <= n:
        if n % d == 0:
            for cand in (d, -d, n // d, -(n // d)):
                if cand not in roots and evaluate(f, cand) == 0:
                    roots.append(cand)
        d += 1
    return sorted(roots)


def to_str(f: Sequence[int], var: str = "x") -> str:
    f = as_poly(f)
    deg = len(f) - 1
    out = ""
    for i, c in enumerate(f):
        k = deg - i
        if c == 0 and deg > 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        mag = abs(c)
        body = (str(mag) if (mag != 1 or not mono) else "") + mono
        if not out:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out or "0"
