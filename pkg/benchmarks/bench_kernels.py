#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the pure-numpy fallback.

Runs the three hot paths on representative workloads and prints a table.

    python3 benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from tensionkit import GridSpec, JointPMF, bit_ot, z_source
from tensionkit._kernels import _fallback
from tensionkit.oracle import _comp_table

try:
    from tensionkit._kernels import _core
except ImportError:
    _core = None


def timeit(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_tension_terms(backend, joint: JointPMF, n_evals: int):
    rng = np.random.default_rng(0)
    nxy = joint.nx * joint.ny
    nq = nxy + 2
    kernels = rng.gamma(1.0, size=(n_evals, nxy, nq))
    kernels /= kernels.sum(axis=2, keepdims=True)

    def run():
        acc = 0.0
        for k in kernels:
            i1, i2, i3 = backend.tension_terms(joint.mass, k)
            acc += i1 + i2 + i3
        return acc

    return timeit(run)


def bench_descend(backend, joint: JointPMF, restarts: int):
    rng = np.random.default_rng(1)
    nxy = joint.nx * joint.ny
    nq = nxy + 2
    starts = rng.gamma(1.0, size=(restarts, nxy, nq))
    starts /= starts.sum(axis=2, keepdims=True)

    def run():
        best = float("inf")
        for w0 in starts:
            w = np.ascontiguousarray(w0.copy())
            value, _iters, _conv = backend.descend(
                joint.mass, w, 1.0, 1.0, 64.0, 2000, 1e-10
            )
            best = min(best, value)
        return best

    return timeit(run, repeat=1)


def bench_sweep(backend, joint: JointPMF, grid: GridSpec, n_dirs: int):
    table, rowent, heads = _comp_table(grid)
    rng = np.random.default_rng(2)
    lams = np.abs(rng.standard_normal((n_dirs, 3)))
    lams /= lams.sum(axis=1, keepdims=True)

    def run():
        minima, *_rest, leaves = backend.oracle_sweep(
            joint.mass, table, rowent, heads, lams, -1.0
        )
        return float(minima.min()), leaves

    return timeit(run, repeat=1)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    backends = [("fallback", _fallback)]
    if _core is not None:
        backends.insert(0, ("compiled", _core))
    else:
        print("note: compiled core not importable; benchmarking fallback only")

    ot = bit_ot().joint
    zs = z_source(0.25).joint
    n_evals = 200 if args.quick else 2000
    restarts = 4 if args.quick else 16
    grid = GridSpec(q_cardinality=3, steps=6) if args.quick else GridSpec(q_cardinality=4, steps=8)

    rows = []
    for name, backend in backends:
        t, _ = bench_tension_terms(backend, ot, n_evals)
        rows.append((f"tension_terms x{n_evals} (bit-OT, q=18)", name, t))
    for name, backend in backends:
        t, best = bench_descend(backend, ot, restarts)
        rows.append((f"descend x{restarts} (bit-OT, lam=(1,1,64))", name, t))
    for name, backend in backends:
        t, (_, leaves) = bench_sweep(backend, zs, grid, 8)
        rows.append((f"oracle_sweep {leaves} channels (z-source)", name, t))

    width = max(len(r[0]) for r in rows) + 2
    print(f"{'workload':<{width}}{'backend':<10}{'seconds':>10}")
    base: dict[str, float] = {}
    for workload, name, t in rows:
        speedup = ""
        if name == "compiled":
            base[workload] = t
        elif workload in base:
            speedup = f"  ({t / base[workload]:.0f}x slower)"
        print(f"{workload:<{width}}{name:<10}{t:>10.3f}{speedup}")


if __name__ == "__main__":
    main()
