"""Benchmark the compiled kernels against the numpy fallback.

Times conv2d forward/input-grad, maxpool, and dense on VGG-ish shapes and
prints a speedup table. The compiled backend is also run at several thread
counts to show prange scaling (results stay bit-identical either way).

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--threads 1,2,4]
"""

import argparse
import time

import numpy as np

from convlens import _kernels_py

try:
    from convlens import _kernels_cy
except ImportError:
    _kernels_cy = None

CASES = (
    ("conv 64x3x224x224 k3", "conv",
     dict(c=3, o=64, h=224, w=224, k=3, stride=1, pad=1)),
    ("conv 128x128x56x56 k3", "conv",
     dict(c=128, o=128, h=56, w=56, k=3, stride=1, pad=1)),
    ("conv 512x512x14x14 k3", "conv",
     dict(c=512, o=512, h=14, w=14, k=3, stride=1, pad=1)),
    ("convgrad 128x128x56x56", "convgrad",
     dict(c=128, o=128, h=56, w=56, k=3, stride=1, pad=1)),
    ("maxpool 64x224x224", "pool", dict(c=64, h=224, w=224)),
    ("dense 4096x25088", "dense", dict(n=25088, m=4096)),
)


def make_args(kind, p, rng):
    if kind in ("conv", "convgrad"):
        x = rng.standard_normal((p["c"], p["h"], p["w"])).astype(np.float32)
        w = rng.standard_normal((p["o"], p["c"], p["k"], p["k"])).astype(np.float32)
        b = rng.standard_normal(p["o"]).astype(np.float32)
        if kind == "conv":
            return (x, w, b, p["stride"], p["pad"])
        oh = (p["h"] + 2 * p["pad"] - p["k"]) // p["stride"] + 1
        ow = (p["w"] + 2 * p["pad"] - p["k"]) // p["stride"] + 1
        gy = rng.standard_normal((p["o"], oh, ow)).astype(np.float32)
        return (gy, w, p["stride"], p["pad"], (p["c"], p["h"], p["w"]))
    if kind == "pool":
        return (rng.standard_normal((p["c"], p["h"], p["w"])).astype(np.float32),)
    x = rng.standard_normal(p["n"]).astype(np.float32)
    w = rng.standard_normal((p["m"], p["n"])).astype(np.float32)
    b = rng.standard_normal(p["m"]).astype(np.float32)
    return (x, w, b)


FUNCS = {"conv": "conv2d_forward", "convgrad": "conv2d_input_grad",
         "pool": "maxpool2x2", "dense": "dense_forward"}


def best_time(fn, args, threads, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args, threads)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", default="1,4",
                    help="comma-separated thread counts for the compiled backend")
    args = ap.parse_args()
    threads = [int(t) for t in args.threads.split(",")]

    if _kernels_cy is None:
        print("compiled backend unavailable; timing numpy fallback only")

    rng = np.random.default_rng(0)
    cy_cols = [f"cython t={t}" for t in threads] if _kernels_cy else []
    header = ["case", "numpy"] + cy_cols + \
        (["cython speedup", "agree"] if _kernels_cy else [])
    rows = []
    for name, kind, params in CASES:
        call_args = make_args(kind, params, rng)
        fn_name = FUNCS[kind]
        t_py = best_time(getattr(_kernels_py, fn_name), call_args, 1, args.repeat)
        row = [name, f"{t_py * 1e3:8.1f} ms"]
        if _kernels_cy:
            t_cy = [best_time(getattr(_kernels_cy, fn_name), call_args, t,
                              args.repeat) for t in threads]
            row += [f"{t * 1e3:8.1f} ms" for t in t_cy]
            row.append(f"{t_py / min(t_cy):5.2f}x")
            # backends may round differently (BLAS vs sequential f32
            # accumulation); agreement is to tolerance, not bit-equality
            ref = getattr(_kernels_py, fn_name)(*call_args, 1)
            got = getattr(_kernels_cy, fn_name)(*call_args, threads[0])
            ref0 = ref[0] if isinstance(ref, tuple) else ref
            got0 = np.asarray(got[0] if isinstance(got, tuple) else got)
            scale = max(1.0, float(np.abs(ref0).max()))
            ok = np.abs(ref0 - got0).max() <= 1e-4 * scale
            row.append("yes" if ok else "NO")
        rows.append(row)

    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(header)]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in rows:
        print("  ".join(v.ljust(w) for v, w in zip(row, widths)))


if __name__ == "__main__":
    main()
