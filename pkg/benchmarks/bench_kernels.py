"""Timings for the quadrature kernels: compiled extension vs numpy fallback.

The hot path of every modulus estimate is circle_qpow_means on batches of
vector pairs, so that is what gets timed, plus one end-to-end modulus
estimate per backend.

Run:  python3 benchmarks/bench_kernels.py [--dim 8] [--batch 2048] [--nodes 64]
"""
import argparse
import importlib
import os
import sys
import time

import numpy as np


def best_of(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernel(mod, A, B, p, q, nodes):
    mod.circle_qpow_means(A, B, p, q, 8)  # warm up
    return best_of(lambda: mod.circle_qpow_means(A, B, p, q, nodes))


def bench_modulus(backend_name, eps, budget):
    """One full H_1 modulus estimate on l1^2 under the selected backend.

    Runs in a subprocess so the backend choice is made at import time,
    the same way users hit it.
    """
    import subprocess
    code = (
        "import time, cvxlab\n"
        "t0 = time.perf_counter()\n"
        f"v = cvxlab.modulus_H_p(cvxlab.lp(1, 2), {eps}, 1.0, {budget}, 0)\n"
        "print(cvxlab.BACKEND, time.perf_counter() - t0, v)\n"
    )
    env = dict(os.environ, CVXLAB_BACKEND=backend_name)
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    name, secs, value = out.stdout.split()
    return name, float(secs), float(value)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=8)
    ap.add_argument("--batch", type=int, default=2048)
    ap.add_argument("--nodes", type=int, default=64)
    ap.add_argument("--budget", type=int, default=2048)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    A = rng.standard_normal((args.batch, args.dim)) \
        + 1j * rng.standard_normal((args.batch, args.dim))
    B = rng.standard_normal((args.batch, args.dim)) \
        + 1j * rng.standard_normal((args.batch, args.dim))

    py = importlib.import_module("cvxlab._core_py")
    backends = [("python", py)]
    try:
        backends.append(("compiled", importlib.import_module("cvxlab._core")))
    except ImportError:
        print("compiled kernels not built; timing the fallback only")

    print(f"circle_qpow_means: batch={args.batch} dim={args.dim} "
          f"nodes={args.nodes}")
    base = None
    for p, q in ((2.0, 2.0), (1.0, 1.0), (4.0, 2.0)):
        row = []
        for name, mod in backends:
            secs = bench_kernel(mod, A, B, p, q, args.nodes)
            row.append(f"{name} {secs * 1e3:8.2f} ms")
            if name == "python":
                base = secs
            elif base:
                row.append(f"speedup {base / secs:5.1f}x")
        print(f"  p={p:<4} q={q:<4} " + "  ".join(row))

    print(f"\nmodulus_H_p(l1^2, 0.5): budget={args.budget}")
    results = []
    for name, _ in backends:
        used, secs, value = bench_modulus(name, 0.5, args.budget)
        results.append((used, secs, value))
        print(f"  {used:8s} {secs * 1e3:8.1f} ms   value={value!r}")
    if len(results) == 2 and results[0][2] != results[1][2]:
        print("  WARNING: backends disagree on the estimate")


if __name__ == "__main__":
    main()
