import math

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from s3deform import padic, polys
from s3deform.classification import classify_extension
from s3deform.errors import LedgerCorrupt, NotPrime, OutOfRange
from s3deform.family_search import (
    COMPOSITE,
    GENERIC,
    LEDGER_HEADER,
    LedgerRecord,
    OpCounter,
    family_prime,
    fast_genericity_witness,
    high_index_candidate_search,
    is_prime_wide,
    read_ledger,
    scan_family_range,
)

SMALL_MEMBERS = {-1: 23, 1: 31, 2: 59, 4: 283, 7: 1399, 10: 4027, 11: 5351}


def fixed_clock():
    return "2000-01-01T00:00:00Z"


@settings(max_examples=300, deadline=None)
@given(st.integers(2, 2 ** 64 - 1))
def test_primality_matches_sympy(n):
    assert is_prime_wide(n) == sympy.isprime(n)


@pytest.mark.parametrize("n,expected", [(2, True), (31, True), (527, False), (561, False),
                                        (3215031751, False), (2 ** 61 - 1, True), (2 ** 64 - 59, True)])
def test_primality_examples(n, expected):
    assert is_prime_wide(n) is expected


def test_primality_range():
    with pytest.raises(OutOfRange):
        is_prime_wide(2 ** 64)


def test_witness_examples():
    w = fast_genericity_witness(1)
    assert (w.p, w.generic) == (31, True)
    assert w.witness == 311
    assert fast_genericity_witness(-1).generic
    with pytest.raises(NotPrime):
        fast_genericity_witness(5)


def test_witness_matches_classifier():
    checked = 0
    for a in range(-1, 61):
        p = family_prime(a)
        if not sympy.isprime(p):
            continue
        w = fast_genericity_witness(a)
        rep = classify_extension((1, 0, a, 1), p)
        assert rep.failure is None, (a, rep.failure)
        assert rep.neat, a
        assert w.generic == rep.generic, a
        checked += 1
    assert checked == 18


def test_witness_is_independent_power_test():
    # the witness equals the index test on the lifted root
    for a in SMALL_MEMBERS:
        w = fast_genericity_witness(a)
        p = w.p
        s = next(r for r, m in polys.roots_mod((1, 0, a, 1), p) if m == 1)
        root = padic.hensel_lift_root((1, 0, a, 1), p, s, 3)
        assert (padic.pth_power_index_qp(root, 1) == 0) == w.generic


def test_op_counter_logarithmic():
    for a in (1, 1000, 10 ** 5 + 3, 10 ** 6 + 50):
        p = family_prime(a)
        if not is_prime_wide(p):
            continue
        c = OpCounter()
        fast_genericity_witness(a, counter=c)
        assert c.mults <= 2 * math.ceil(math.log2(p)) + 1


def test_small_scan_members():
    summary = scan_family_range(-1, 12)
    assert dict(summary.primes) == SMALL_MEMBERS
    assert summary.generic == 7 and not summary.alarm
    assert summary.records == 14
    assert scan_family_range(1, 0).records == 0
    assert scan_family_range(-9, -2).records == 0


def test_ledger_round_trip(tmp_path):
    path = tmp_path / "ledger.txt"
    scan_family_range(-1, 300, ledger_path=path, clock=fixed_clock)
    text = path.read_text()
    assert text.startswith(LEDGER_HEADER + "\n")
    recs = read_ledger(path)
    assert [r.a for r in recs] == list(range(-1, 301))
    assert "".join(r.to_line() + "\n" for r in recs) == text[len(LEDGER_HEADER) + 1:]
    for r in recs:
        assert r.p == family_prime(r.a)
        assert (r.status == COMPOSITE) == (not sympy.isprime(r.p))


def test_ledger_checksum_detects_corruption(tmp_path):
    path = tmp_path / "ledger.txt"
    scan_family_range(-1, 20, ledger_path=path, clock=fixed_clock)
    lines = path.read_text().split("\n")
    lines[3] = lines[3].replace(GENERIC, "prime-nongeneric-witness") if GENERIC in lines[3] else lines[3][:-1] + "0"
    path.write_text("\n".join(lines))
    with pytest.raises(LedgerCorrupt):
        read_ledger(path)
    with pytest.raises(LedgerCorrupt):
        LedgerRecord.from_line("1,31,prime-generic,311,2000-01-01T00:00:00Z,00000000")


def test_refuses_to_overwrite(tmp_path):
    path = tmp_path / "ledger.txt"
    scan_family_range(-1, 5, ledger_path=path)
    with pytest.raises(FileExistsError):
        scan_family_range(-1, 5, ledger_path=path)


def test_resume_after_interruption(tmp_path):
    full = tmp_path / "full.txt"
    cut = tmp_path / "cut.txt"
    scan_family_range(-1, 2000, ledger_path=full, chunk_size=100, clock=fixed_clock)
    scan_family_range(-1, 2000, ledger_path=cut, chunk_size=100, clock=fixed_clock, stop_after_chunks=7)
    # simulate a write torn mid-line
    with open(cut, "a") as fh:
        fh.write("699,1371796027,prime-gen")
    summary = scan_family_range(-1, 2000, ledger_path=cut, chunk_size=100, clock=fixed_clock, resume=True)
    assert summary.resumed_from == 699
    assert cut.read_text() == full.read_text()
    assert summary.records == 2002


def test_parallel_equals_serial(tmp_path):
    a = tmp_path / "serial.txt"
    b = tmp_path / "parallel.txt"
    s1 = scan_family_range(-1, 20000, ledger_path=a, chunk_size=1000, clock=fixed_clock)
    s4 = scan_family_range(-1, 20000, ledger_path=b, chunk_size=1000, clock=fixed_clock, workers=4)
    assert a.read_text() == b.read_text()
    assert s1.to_dict() == s4.to_dict()


def test_python_path_matches_kernel():
    fast = scan_family_range(-1, 400, use_numba=False)
    for a, p in fast.primes:
        assert fast_genericity_witness(a).generic


def test_high_index_search():
    cands = high_index_candidate_search(5, 2, 30, 30)
    pairs = [(c.r, c.s) for c in cands]
    assert (-29, 4) in pairs
    for c in cands:
        assert (c.r + c.s) % 25 == 0
        assert polys.evaluate((1, c.r, c.s, -1), 1) % 25 == 0
        assert c.root_minus_one_valuation >= 2
        assert c.unit_power_index >= 1
        assert c.poly_disc < 0
    assert high_index_candidate_search(5, 1, 1, 1) == []
