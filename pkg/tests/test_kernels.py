import numpy as np
import pytest
import sympy

from s3deform import _kernels
from s3deform.family_search import fast_genericity_witness


def _reference(a_arr):
    status, wits = [], []
    for a in a_arr:
        p = 27 + 4 * int(a) ** 3
        if not sympy.isprime(p):
            status.append(0)
            wits.append(None)
            continue
        w = fast_genericity_witness(int(a))
        status.append(1 if w.generic else 2)
        wits.append(w.witness)
    return status, wits


def _batch(values):
    a = np.array(values, dtype=np.int64)
    return a, 27 + 4 * a ** 3


@pytest.mark.parametrize("use_numba", [False, pytest.param(True, marks=pytest.mark.skipif(
    not _kernels.HAVE_NUMBA, reason="numba not installed"))])
def test_kernel_matches_reference(use_numba):
    rng = np.random.default_rng(7)
    values = list(range(-1, 300)) + sorted(rng.integers(300, 49999, 400).tolist()) + [49999]
    a, p = _batch(values)
    status, w0, w1 = _kernels.scan_batch(a, p, use_numba=use_numba)
    ref_status, ref_w = _reference(values)
    assert status.tolist() == ref_status
    for k, w in enumerate(ref_w):
        if w is not None:
            assert int(w0[k]) + int(w1[k]) * int(p[k]) == w


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")
def test_numba_and_numpy_agree():
    a, p = _batch(range(-1, 20000))
    got_nb = _kernels.scan_batch(a, p, use_numba=True)
    got_np = _kernels.scan_batch(a, p, use_numba=False)
    for x, y in zip(got_nb, got_np):
        assert np.array_equal(x, y)


def test_env_flag(monkeypatch):
    monkeypatch.setenv("S3DEFORM_DISABLE_NUMBA", "1")
    assert not _kernels.numba_enabled()
    monkeypatch.setenv("S3DEFORM_DISABLE_NUMBA", "0")
    assert _kernels.numba_enabled() == _kernels.HAVE_NUMBA
    monkeypatch.delenv("S3DEFORM_DISABLE_NUMBA")
    assert _kernels.numba_enabled() == _kernels.HAVE_NUMBA


def test_pseudoprimes_rejected():
    # strong pseudoprimes to several small bases, and Carmichael numbers
    n = np.array([561, 1105, 3215031751, 2152302898747, 3474749660383, 341550071728321], dtype=np.int64)
    a = np.zeros_like(n)
    for use in (False, True) if _kernels.HAVE_NUMBA else (False,):
        status, _, _ = _kernels.scan_batch(a, n, use_numba=use)
        assert status.tolist() == [0] * len(n)
