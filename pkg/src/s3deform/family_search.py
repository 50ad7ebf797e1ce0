"""Search the family x^3 + ax + 1 (p = 27 + 4a^3) for generic members, and the
family x^3 + rx^2 + sx - 1 for high-index candidates."""
from __future__ import annotations

import logging
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np

from . import _kernels, padic, polys
from . import number_field as nf
from .errors import LedgerCorrupt, NoSimpleRoot, NotPrime, OutOfRange

log = logging.getLogger(__name__)

SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)
MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
WIDE_LIMIT = 1 << 64

LEDGER_SCHEMA = "s3deform-ledger/1"
LEDGER_HEADER = f"# {LEDGER_SCHEMA} family=x^3+ax+1 fields=a,p,status,witness,timestamp,crc32"

GENERIC = "prime-generic"
NONGENERIC = "prime-nongeneric-witness"
COMPOSITE = "composite"
SKIPPED = "skipped"
STATUSES = (GENERIC, NONGENERIC, COMPOSITE, SKIPPED)


def is_prime_wide(n: int) -> bool:
    """Deterministic Miller-Rabin; the base set is complete below 3.3e24, so any n < 2^64 is decided."""
    if n >= WIDE_LIMIT:
        raise OutOfRange(f"{n} is outside the supported range [2, 2^64)")
    if n < 2:
        return False
    for q in SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in MR_BASES:
        x = pow(b, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def family_prime(a: int) -> int:
    return 27 + 4 * a ** 3


@dataclass
class OpCounter:
    mults: int = 0


def _powmod_counted(b: int, e: int, m: int, counter: OpCounter | None) -> int:
    r = 1
    b %= m
    while e:
        if e & 1:
            r = r * b % m
            if counter is not None:
                counter.mults += 1
        e >>= 1
        if e:
            b = b * b % m
            if counter is not None:
                counter.mults += 1
    return r


@dataclass(frozen=True)
class Witness:
    a: int
    p: int
    generic: bool
    witness: int  # u^(p-1) mod p^2

    @property
    def verdict(self) -> str:
        return "generic" if self.generic else "nongeneric"


def fast_genericity_witness(a: int, counter: OpCounter | None = None) -> Witness:
    """Generic iff u^(p-1) != 1 mod p^2 for the unit x at the simple root mod p = 27 + 4a^3."""
    p = family_prime(a)
    if p <= 3 or not is_prime_wide(p):
        raise NotPrime(f"27 + 4*({a})^3 = {p} is not a prime > 3")
    f = (1, 0, a, 1)
    s = 3 * pow(a, -1, p) % p  # the double root is -3/(2a)
    if polys.evaluate(f, s, p) != 0 or polys.evaluate(polys.derivative(f), s, p) == 0:
        raise NoSimpleRoot(f"3/a is not a simple root of x^3 + {a}x + 1 mod {p}")
    r = padic.hensel_lift_root(f, p, s, 2).residue
    w = _powmod_counted(r, p - 1, p * p, counter)
    if w % p != 1:
        raise NoSimpleRoot("Fermat check failed; arithmetic error")
    return Witness(a=a, p=p, generic=w != 1, witness=w)


# -- ledger ------------------------------------------------------------------


@dataclass(frozen=True)
class LedgerRecord:
    a: int
    p: int
    status: str
    witness: int | None
    timestamp: str = field(default="", compare=False)

    def __post_init__(self):
        if self.p != family_prime(self.a):
            raise ValueError(f"p = {self.p} does not match a = {self.a}")
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    def body(self) -> str:
        w = "" if self.witness is None else str(self.witness)
        return f"{self.a},{self.p},{self.status},{w},{self.timestamp}"

    def to_line(self) -> str:
        body = self.body()
        return f"{body},{zlib.crc32(body.encode()):08x}"

    @classmethod
    def from_line(cls, line: str) -> "LedgerRecord":
        body, sep, crc = line.rpartition(",")
        if not sep or f"{zlib.crc32(body.encode()):08x}" != crc:
            raise LedgerCorrupt(f"checksum mismatch: {line!r}")
        parts = body.split(",")
        if len(parts) != 5:
            raise LedgerCorrupt(f"wrong field count: {line!r}")
        a, p, status, w, ts = parts
        try:
            return cls(int(a), int(p), status, int(w) if w else None, ts)
        except ValueError as exc:
            raise LedgerCorrupt(f"bad record {line!r}: {exc}") from exc


def read_ledger(path: str | os.PathLike, repair: bool = False) -> list[LedgerRecord]:
    """Parse a ledger.  An unterminated final line is an interrupted write: it is
    dropped (and cut from the file when ``repair``); any other bad line is corruption."""
    path = Path(path)
    data = path.read_bytes().decode()
    if not data.startswith(LEDGER_HEADER + "\n"):
        raise LedgerCorrupt(f"{path}: missing or unknown header")
    body = data[len(LEDGER_HEADER) + 1:]
    lines = body.split("\n")
    tail = lines.pop()  # text after the final newline
    if tail and repair:
        with open(path, "r+b") as fh:
            fh.truncate(len(data.encode()) - len(tail.encode()))
        log.warning("dropped an incomplete final ledger line")
    records = [LedgerRecord.from_line(ln) for ln in lines]
    for prev, cur in zip(records, records[1:]):
        if cur.a <= prev.a:
            raise LedgerCorrupt(f"records out of order at a = {cur.a}")
    return records


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


# -- scanning ------------------------------------------------------------------


def _classify_chunk(bounds: tuple[int, int, bool | None]) -> list[tuple[int, int, str, int | None]]:
    """Stateless worker: verdicts for a in [lo, hi] with 27 + 4a^3 > 0."""
    lo, hi, use_numba = bounds
    lo = max(lo, -1)  # 27 + 4a^3 <= 0 for a <= -2
    if hi < lo:
        return []
    out: list[tuple[int, int, str, int | None]] = []
    a_all = list(range(lo, hi + 1))
    fast = [a for a in a_all if family_prime(a) < _kernels.LIMIT]
    res: dict[int, tuple[str, int | None]] = {}
    if fast:
        arr = np.array(fast, dtype=np.int64)
        status, w0, w1 = _kernels.scan_batch(arr, 27 + 4 * arr ** 3, use_numba=use_numba)
        for k, a in enumerate(fast):
            p = family_prime(a)
            if status[k] == 0:
                res[a] = (COMPOSITE, None)
            else:
                w = int(w0[k]) + int(w1[k]) * p
                res[a] = (GENERIC if status[k] == 1 else NONGENERIC, w)
    for a in a_all:
        p = family_prime(a)
        if a in res:
            status_s, w = res[a]
        else:
            try:
                prime = is_prime_wide(p)
            except OutOfRange:
                out.append((a, p, SKIPPED, None))
                continue
            if not prime:
                status_s, w = COMPOSITE, None
            else:
                wit = fast_genericity_witness(a)
                status_s, w = (GENERIC if wit.generic else NONGENERIC), wit.witness
        out.append((a, p, status_s, w))
    return out


def _chunks(lo: int, hi: int, size: int) -> Iterator[tuple[int, int]]:
    a = lo
    while a <= hi:
        yield a, min(hi, a + size - 1)
        a += size


@dataclass
class ScanSummary:
    a_lo: int
    a_hi: int
    records: int = 0
    n_primes: int = 0
    primes: list[tuple[int, int]] = field(default_factory=list)
    composite: int = 0
    skipped: int = 0
    nongeneric: list[tuple[int, int]] = field(default_factory=list)
    resumed_from: int | None = None
    keep_primes: int = 1000

    @property
    def generic(self) -> int:
        return self.n_primes - len(self.nongeneric)

    @property
    def alarm(self) -> bool:
        return bool(self.nongeneric)

    def add(self, rec: LedgerRecord) -> None:
        self.records += 1
        if rec.status == COMPOSITE:
            self.composite += 1
        elif rec.status == SKIPPED:
            self.skipped += 1
        else:
            self.n_primes += 1
            if len(self.primes) < self.keep_primes:
                self.primes.append((rec.a, rec.p))
            if rec.status == NONGENERIC:
                self.nongeneric.append((rec.a, rec.p))
                log.error("COUNTEREXAMPLE: a = %d, p = %d is prime but not generic", rec.a, rec.p)

    def to_dict(self) -> dict:
        return {
            "range": [self.a_lo, self.a_hi],
            "records": self.records,
            "prime_members": self.n_primes,
            "generic": self.generic,
            "composite": self.composite,
            "skipped": self.skipped,
            "primes": [list(t) for t in self.primes],
            "nongeneric": [list(t) for t in self.nongeneric],
            "alarm": self.alarm,
            "resumed_from": self.resumed_from,
        }


def scan_family_range(
    a_lo: int,
    a_hi: int,
    ledger_path: str | os.PathLike | None = None,
    workers: int = 1,
    resume: bool = False,
    chunk_size: int = 4096,
    clock: Callable[[], str] = _utc_now,
    use_numba: bool | None = None,
    stop_after_chunks: int | None = None,
) -> ScanSummary:
    """Classify every a in [a_lo, a_hi] with 27 + 4a^3 > 0, appending to a ledger.

    ``stop_after_chunks`` ends the scan early (used to simulate interruption).
    """
    summary = ScanSummary(a_lo, a_hi)
    start = a_lo
    fh = None
    if ledger_path is not None:
        path = Path(ledger_path)
        if path.exists() and path.stat().st_size > 0:
            if not resume:
                raise FileExistsError(f"{path} exists; pass resume=True to continue it")
            old = read_ledger(path, repair=True)
            for rec in old:
                if a_lo <= rec.a <= a_hi:
                    summary.add(rec)
            if old:
                start = max(a_lo, old[-1].a + 1)
                summary.resumed_from = start
            fh = open(path, "a", encoding="utf-8")
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            fh = open(path, "w", encoding="utf-8")
            fh.write(LEDGER_HEADER + "\n")
            fh.flush()
    jobs = [(lo, hi, use_numba) for lo, hi in _chunks(start, a_hi, chunk_size)]
    if stop_after_chunks is not None:
        jobs = jobs[:stop_after_chunks]
    try:
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                _consume(pool.map(_classify_chunk, jobs), summary, fh, clock)
        else:
            _consume(map(_classify_chunk, jobs), summary, fh, clock)
    finally:
        if fh is not None:
            fh.close()
    return summary


def _consume(results: Iterable, summary: ScanSummary, fh, clock) -> None:
    # single writer, results arrive in chunk order
    for chunk in results:
        lines = []
        for a, p, status, w in chunk:
            rec = LedgerRecord(a, p, status, w, clock())
            summary.add(rec)
            lines.append(rec.to_line() + "\n")
        if fh is not None and lines:
            fh.write("".join(lines))
            fh.flush()


# -- high-index family -----------------------------------------------------------


@dataclass(frozen=True)
class HighIndexCandidate:
    r: int
    s: int
    p: int
    n: int
    poly_disc: int
    root: int  # Q_p root over the simple root mod p, to precision n + 2
    root_minus_one_valuation: int
    unit_power_index: int  # power index of the unit x at that root

    @property
    def coefficients(self) -> tuple[int, int, int]:
        return (self.r, self.s, -1)


def high_index_candidate_search(p: int, n: int, r_bound: int, s_bound: int) -> list[HighIndexCandidate]:
    """All (r, s) with |r| <= r_bound, |s| <= s_bound, p^n | r + s, such that
    x^3 + rx^2 + sx - 1 is irreducible, has one real root and p has type
    [(2,1),(1,1)]."""
    if p <= 3 or not is_prime_wide(p):
        raise ValueError(f"p = {p} must be a prime > 3")
    if n < 1 or r_bound < 0 or s_bound < 0:
        raise ValueError("need n >= 1 and nonnegative bounds")
    pn = p ** n
    N = n + 2
    out = []
    for r in range(-r_bound, r_bound + 1):
        s0 = -r + ((-s_bound + r) // pn) * pn
        for s in range(s0, s_bound + 1, pn):
            if s < -s_bound or (r + s) % pn:
                continue
            f = (1, r, s, -1)
            # rational roots can only be +-1: f(1) = r + s, f(-1) = r - s - 2
            if r + s == 0 or r - s - 2 == 0:
                continue
            disc = polys.cubic_discriminant(f)
            if disc >= 0:
                continue
            if sorted(m for _, m in polys.roots_mod(f, p)) != [1, 2]:
                continue
            if disc % (p * p) == 0:
                K = nf.maximal_order_basis(f)
                if nf.prime_splitting_type(K, p, allow_index_divisor=True) != nf.SplittingType(((2, 1), (1, 1))):
                    continue
            simple = next(x for x, m in polys.roots_mod(f, p) if m == 1)
            root = padic.hensel_lift_root(f, p, simple, N)
            v = int(min(padic.vp(root.residue - 1, p), N))
            idx = padic.pth_power_index_qp(root, N - 1)
            out.append(HighIndexCandidate(r, s, p, n, disc, root.residue, v, idx))
    return out
