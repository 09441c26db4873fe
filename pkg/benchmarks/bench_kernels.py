"""Micro-benchmark comparing the compiled kernel backend with numpy.

Run as a script:

    python benchmarks/bench_kernels.py [--repeats 200]

Each kernel is timed on sizes typical for this package (hidden layers of a
few hundred units, batch 64, belief vectors of a handful of values) and on
one larger size to show where the compiled code stops mattering.
"""

import argparse
import importlib
import os
import sys
import time

import numpy as np


def load_backends():
    backends = {}
    for name, force_pure in (("fast", False), ("pure", True)):
        os.environ.pop("FEUDALGAIN_PURE", None)
        if force_pure:
            os.environ["FEUDALGAIN_PURE"] = "1"
        for mod in [m for m in list(sys.modules) if m.startswith("feudalgain")]:
            del sys.modules[mod]
        kernels = importlib.import_module("feudalgain.kernels")
        backends[name] = kernels
        if not force_pure and kernels.BACKEND == "pure":
            print("compiled extension unavailable; comparing pure vs pure")
    os.environ.pop("FEUDALGAIN_PURE", None)
    return backends


def bench(fn, args, repeats):
    fn(*args)  # warm-up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats


def cases(rng):
    def mats(batch, n_in, n_out):
        x = rng.standard_normal((batch, n_in))
        w = rng.standard_normal((n_out, n_in))
        b = rng.standard_normal(n_out)
        dy = rng.standard_normal((batch, n_out))
        return x, w, b, dy

    out = []
    for label, (batch, n_in, n_out) in (
        ("small (64x130->50)", (64, 130, 50)),
        ("policy (64x250->130)", (64, 250, 130)),
        ("large (256x512->512)", (256, 512, 512)),
    ):
        x, w, b, dy = mats(batch, n_in, n_out)
        out.append((f"affine {label}", "affine", (x, w, b)))
        out.append((f"affine_backward {label}", "affine_backward", (x, w, dy)))
        z = rng.standard_normal((batch, n_out))
        out.append((f"relu {label}", "relu", (z,)))
        out.append((f"relu_backward {label}", "relu_backward", (z, dy)))

    p = rng.random(5)
    p /= p.sum()
    q = rng.random(5)
    q /= q.sum()
    out.append(("js_divergence (5 values)", "js_divergence", (p, q)))
    p = rng.random(200)
    p /= p.sum()
    q = rng.random(200)
    q /= q.sum()
    out.append(("js_divergence (200 values)", "js_divergence", (p, q)))

    param = rng.standard_normal(250 * 130)
    grad = rng.standard_normal(250 * 130)
    m = np.zeros_like(param)
    v = np.zeros_like(param)
    out.append(("adam_step (32.5k params)", "adam_step",
                (param, grad, m, v, 3, 1e-3, 0.9, 0.999, 1e-8)))
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    backends = load_backends()
    rng = np.random.default_rng(0)
    rows = []
    for label, fn_name, fn_args in cases(rng):
        times = {}
        for name, kernels in backends.items():
            copies = tuple(a.copy() if isinstance(a, np.ndarray) else a
                           for a in fn_args)
            times[name] = bench(getattr(kernels, fn_name), copies,
                                args.repeats)
        rows.append((label, times["fast"], times["pure"]))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'fast':>10}  {'pure':>10}  speedup")
    for label, fast, pure in rows:
        print(f"{label:<{width}}  {fast * 1e6:>8.1f}us  {pure * 1e6:>8.1f}us"
              f"  {pure / fast:>6.2f}x")


if __name__ == "__main__":
    main()
