"""Compare the compiled kernels with the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json]
"""
import argparse
import json
import timeit

import numpy as np

from hypercube_lsi import _pykernels

try:
    from hypercube_lsi import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases(rng):
    for n in (10, 14, 18):
        a = rng.standard_normal(1 << n)
        yield f"wht n={n}", lambda k, a=a: k.fwht_inplace(a.copy())
        yield f"heat n={n}", lambda k, a=a: k.heat_inplace(np.abs(a), 0.8, 0.2)
        yield f"laplacian n={n}", lambda k, a=a: k.laplacian(a)
    for kk, n in ((10, 20), (14, 30), (18, 40)):
        rows = [int(v) for v in rng.integers(1, 1 << n, size=kk)]
        yield f"gf2 profile k={kk} n={n}", \
            lambda k, rows=rows, n=n: k.gf2_weight_profile(np.array(rows, dtype=np.uint64), n)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    rows = []
    for name, fn in cases(rng):
        row = {"case": name}
        for label, mod in (("python", _pykernels), ("cython", _ckernels)):
            if mod is None:
                row[label] = None
                continue
            fn(mod)
            row[label] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        rows.append(row)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'case':28s} {'python ms':>11s} {'cython ms':>11s} {'speedup':>8s}")
    for r in rows:
        py, cy = r["python"], r["cython"]
        sp = f"{py / cy:8.1f}" if cy else "       -"
        cys = f"{cy * 1e3:11.3f}" if cy else "          -"
        print(f"{r['case']:28s} {py * 1e3:11.3f} {cys} {sp}")


if __name__ == "__main__":
    main()
