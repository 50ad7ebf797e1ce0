"""Batch kernels for the x^3 + ax + 1 family scan.

Moduli are below 2**50, so a*b mod n can be formed with a float quotient
estimate and a wrapping 64-bit correction, and numbers mod p^2 are kept as
two p-adic digits.  The numba versions are used unless S3DEFORM_DISABLE_NUMBA
is set (or numba is unavailable); the numpy versions vectorize the same
arithmetic over the batch.
"""
from __future__ import annotations

import os

import numpy as np

LIMIT = 1 << 50
MR_BASES = np.array([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41], dtype=np.int64)

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def numba_enabled() -> bool:
    flag = os.environ.get("S3DEFORM_DISABLE_NUMBA", "").strip().lower()
    return HAVE_NUMBA and flag not in ("1", "true", "yes", "on")


# -- scalar primitives, shared source for numba and plain python -------------


def _mulmod(a, b, n):
    q = np.int64(np.float64(a) * np.float64(b) / np.float64(n))
    r = np.int64(a * b - q * n)
    while r < 0:
        r += n
    while r >= n:
        r -= n
    return r


def _powmod(b, e, n):
    r = np.int64(1)
    b = b % n
    while e > 0:
        if e & 1:
            r = _mulmod(r, b, n)
        b = _mulmod(b, b, n)
        e >>= 1
    return r


def _inv64(p):
    x = np.uint64(p)
    two = np.uint64(2)
    pu = np.uint64(p)
    for _ in range(6):
        x = x * (two - pu * x)
    return x


def _mul2(x0, x1, y0, y1, p, pinv):
    """(x0 + x1 p)(y0 + y1 p) mod p^2 on digits."""
    r = _mulmod(x0, y0, p)
    q = np.int64((np.uint64(x0) * np.uint64(y0) - np.uint64(r)) * pinv)
    d1 = (q + _mulmod(x0, y1, p) + _mulmod(x1, y0, p)) % p
    return r, d1


def _is_prime(n, bases):
    if n < 2:
        return False
    for b in bases:
        if n == b:
            return True
        if n % b == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in bases:
        x = _powmod(b, d, n)
        if x == 1 or x == n - 1:
            continue
        composite = True
        for _ in range(s - 1):
            x = _mulmod(x, x, n)
            if x == n - 1:
                composite = False
                break
        if composite:
            return False
    return True


def _witness(a, p):
    """Digits (w0, w1) of r^(p-1) mod p^2, r the Z_p root of x^3+ax+1 over the simple root mod p."""
    pinv = _inv64(p)
    am = a % p
    s = _mulmod(3, _powmod(am, p - 2, p), p)
    # f(s) mod p^2; s and a as digit pairs
    a0 = am
    a1 = ((a - a0) // p) % p
    s2_0, s2_1 = _mul2(s, 0, s, 0, p, pinv)
    s3_0, s3_1 = _mul2(s2_0, s2_1, s, 0, p, pinv)
    as_0, as_1 = _mul2(a0, a1, s, 0, p, pinv)
    t0 = s3_0 + as_0 + 1
    t1 = s3_1 + as_1 + t0 // p
    f1 = t1 % p  # f(s) = f1 * p mod p^2
    fp = (_mulmod(3, _mulmod(s, s, p), p) + am) % p
    corr = _mulmod(f1, _powmod(fp, p - 2, p), p)
    r0, r1 = s, (p - corr) % p
    # r^(p-1)
    w0, w1 = np.int64(1), np.int64(0)
    b0, b1 = r0, r1
    e = p - 1
    while e > 0:
        if e & 1:
            w0, w1 = _mul2(w0, w1, b0, b1, p, pinv)
        b0, b1 = _mul2(b0, b1, b0, b1, p, pinv)
        e >>= 1
    return w0, w1


def _scan_batch(a_arr, p_arr, status, w0_arr, w1_arr, bases):
    for k in range(a_arr.shape[0]):
        p = p_arr[k]
        if not _is_prime(p, bases):
            status[k] = 0
            continue
        w0, w1 = _witness(a_arr[k], p)
        w0_arr[k] = w0
        w1_arr[k] = w1
        status[k] = 1 if w1 != 0 else 2


def _jit_all():
    """Compile the scalar primitives in dependency order."""
    global _mulmod, _powmod, _inv64, _mul2, _is_prime, _witness
    ns = globals()
    for name in ("_mulmod", "_powmod", "_inv64", "_mul2", "_is_prime", "_witness"):
        ns[name] = njit(cache=True)(ns[name])
    return njit(cache=True)(_scan_batch_py)


_scan_batch_py = _scan_batch
_scan_batch_nb = None


def scan_batch_numba(a_arr, p_arr):
    global _scan_batch_nb
    if _scan_batch_nb is None:
        _scan_batch_nb = _jit_all()
    n = a_arr.shape[0]
    status = np.zeros(n, dtype=np.int8)
    w0 = np.zeros(n, dtype=np.int64)
    w1 = np.zeros(n, dtype=np.int64)
    _scan_batch_nb(a_arr.astype(np.int64), p_arr.astype(np.int64), status, w0, w1, MR_BASES)
    return status, w0, w1


# -- numpy fallback ----------------------------------------------------------


def _v_mulmod(a, b, n):
    with np.errstate(over="ignore"):
        q = (a.astype(np.float64) * b.astype(np.float64) / n.astype(np.float64)).astype(np.int64)
        r = a * b - q * n
    r = np.where(r < 0, r + n, r)
    r = np.where(r < 0, r + n, r)
    r = np.where(r >= n, r - n, r)
    r = np.where(r >= n, r - n, r)
    return r


def _v_powmod(b, e, n):
    b = b % n
    e = e.copy()
    r = np.ones_like(n)
    while np.any(e > 0):
        odd = (e & 1) == 1
        r = np.where(odd, _v_mulmod(r, b, n), r)
        b = _v_mulmod(b, b, n)
        e >>= 1
    return r


def _v_inv64(p):
    x = p.astype(np.uint64)
    pu = p.astype(np.uint64)
    with np.errstate(over="ignore"):
        for _ in range(6):
            x = x * (np.uint64(2) - pu * x)
    return x


def _v_mul2(x0, x1, y0, y1, p, pinv):
    r = _v_mulmod(x0, y0, p)
    with np.errstate(over="ignore"):
        q = ((x0.astype(np.uint64) * y0.astype(np.uint64) - r.astype(np.uint64)) * pinv).astype(np.int64)
    d1 = (q + _v_mulmod(x0, y1, p) + _v_mulmod(x1, y0, p)) % p
    return r, d1


def _v_is_prime(n):
    n = n.astype(np.int64)
    result = n >= 2
    decided = ~result
    for b in MR_BASES:
        eq = (n == b) & ~decided
        result = np.where(eq, True, result)
        decided |= eq
        div = (n % b == 0) & ~decided
        result = np.where(div, False, result)
        decided |= div
    d = np.where(decided, 3, n - 1)
    s = np.zeros_like(n)
    while True:
        even = (d % 2 == 0) & ~decided
        if not np.any(even):
            break
        d = np.where(even, d // 2, d)
        s = np.where(even, s + 1, s)
    m = np.where(decided, 5, n)
    for b in MR_BASES:
        x = _v_powmod(np.full_like(m, b), d, m)
        ok = (x == 1) | (x == m - 1)
        smax = int(s.max()) if s.size else 0
        for t in range(1, smax):
            x = _v_mulmod(x, x, m)
            ok |= (x == m - 1) & (t < s)
        fail = ~ok & ~decided
        result = np.where(fail, False, result)
        decided |= fail
    return result


def scan_batch_numpy(a_arr, p_arr):
    a = a_arr.astype(np.int64)
    p = p_arr.astype(np.int64)
    n = a.shape[0]
    status = np.zeros(n, dtype=np.int8)
    w0 = np.zeros(n, dtype=np.int64)
    w1 = np.zeros(n, dtype=np.int64)
    prime = _v_is_prime(p)
    if not np.any(prime):
        return status, w0, w1
    a, p = a[prime], p[prime]
    pinv = _v_inv64(p)
    am = a % p
    s = _v_mulmod(np.full_like(p, 3), _v_powmod(am, p - 2, p), p)
    a1 = ((a - am) // p) % p
    zero = np.zeros_like(p)
    s2_0, s2_1 = _v_mul2(s, zero, s, zero, p, pinv)
    s3_0, s3_1 = _v_mul2(s2_0, s2_1, s, zero, p, pinv)
    as_0, as_1 = _v_mul2(am, a1, s, zero, p, pinv)
    t0 = s3_0 + as_0 + 1
    f1 = (s3_1 + as_1 + t0 // p) % p
    fp = (_v_mulmod(np.full_like(p, 3), _v_mulmod(s, s, p), p) + am) % p
    corr = _v_mulmod(f1, _v_powmod(fp, p - 2, p), p)
    b0, b1 = s, (p - corr) % p
    r0, r1 = np.ones_like(p), zero.copy()
    e = p - 1
    while np.any(e > 0):
        odd = (e & 1) == 1
        m0, m1 = _v_mul2(r0, r1, b0, b1, p, pinv)
        r0 = np.where(odd, m0, r0)
        r1 = np.where(odd, m1, r1)
        b0, b1 = _v_mul2(b0, b1, b0, b1, p, pinv)
        e >>= 1
    status[prime] = np.where(r1 != 0, 1, 2)
    w0[prime] = r0
    w1[prime] = r1
    return status, w0, w1


def scan_batch(a_arr, p_arr, use_numba: bool | None = None):
    """Status codes (0 composite, 1 generic, 2 nongeneric) and witness digits for a batch.

    Every p must satisfy 5 <= p < 2**50.
    """
    if use_numba is None:
        use_numba = numba_enabled()
    if use_numba and HAVE_NUMBA:
        return scan_batch_numba(a_arr, p_arr)
    return scan_batch_numpy(a_arr, p_arr)
