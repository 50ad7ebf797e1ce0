"""Compare the numba and numpy witness kernels on a slice of the x^3+ax+1 family."""
import argparse
import time

import numpy as np

from s3deform import _kernels


def _batch(a_lo, a_hi):
    a = np.arange(max(a_lo, -1), a_hi + 1, dtype=np.int64)
    p = 27 + 4 * a ** 3
    return a, p


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=int, default=-1)
    ap.add_argument("--hi", type=int, default=49999, help="a <= 49999 keeps 27+4a^3 below 5e14")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    a, p = _batch(args.lo, args.hi)
    print(f"batch: {a.size} values of a, max p = {int(p.max())}")

    results = {}
    if _kernels.HAVE_NUMBA:
        t0 = time.perf_counter()
        _kernels.scan_batch(a[:8], p[:8], use_numba=True)
        print(f"numba compile/load:   {time.perf_counter() - t0:8.3f} s")
        t, results["numba"] = _time(lambda: _kernels.scan_batch(a, p, use_numba=True), args.repeat)
        print(f"numba warm:           {t:8.3f} s")
    else:
        print("numba not importable, skipping")
    t, results["numpy"] = _time(lambda: _kernels.scan_batch(a, p, use_numba=False), args.repeat)
    print(f"numpy:                {t:8.3f} s")

    status = results["numpy"][0]
    print(f"primes {int((status > 0).sum())}, nongeneric {int((status == 2).sum())}")
    if "numba" in results:
        same = all(np.array_equal(x, y) for x, y in zip(results["numba"], results["numpy"]))
        print(f"kernels agree: {same}")
        return 0 if same else 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
