"""Time the compiled kernels against the pure NumPy fallback.

Run from the repository root after installing the package:

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --n 500000 --steps 200000

Reports the best wall time over a few repeats for each kernel and backend.
When the extension is unavailable only the fallback column is filled.
"""

import argparse
import time

import numpy as np

from lunasil._kernels import _pure
from lunasil.thermal import _compile, default_network

try:
    from lunasil._kernels import _core
except ImportError:
    _core = None


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_allan(impl, n, repeats):
    rng = np.random.default_rng(12345)
    x = np.cumsum(rng.standard_normal(n)) * 1e-16
    ms = 2 ** np.arange(0, int(np.log2(n // 4)), dtype=np.int64)
    out = {}
    for name in ("adev_sums", "madev_sums", "lag_sq_sums"):
        fn = getattr(impl, name)
        out[name] = best_of(lambda: fn(x, ms), repeats)
    return out


def bench_thermal(impl, n_steps, repeats):
    comp = _compile(default_network())
    n_nodes = comp.temps0.shape[0]
    table_t = np.array([0.0, n_steps * 10.0])
    n_bnd = comp.boundary_idx.shape[0]
    table_vals = np.empty((2, n_bnd))
    for pos, idx in enumerate(comp.boundary_idx):
        table_vals[:, pos] = comp.temps0[idx]
    record_every = max(1, n_steps // 500)
    n_rec = n_steps // record_every + 2

    def run():
        out_t = np.empty(n_rec)
        out_temps = np.empty((n_rec, n_nodes))
        out_heater = np.empty(n_rec)
        out_e1 = np.empty(n_rec)
        out_e2 = np.empty(n_rec)
        status = impl.thermal_transient(
            comp.temps0.copy(),
            comp.inv_c,
            comp.const_load,
            comp.link_kind,
            comp.link_a,
            comp.link_b,
            comp.link_c1,
            comp.link_c2,
            comp.boundary_idx,
            table_t,
            table_vals,
            comp.ambient_pos,
            40.0,
            comp.heater_idx,
            16.0,
            0.02,
            5e-6,
            1.0,
            0.01,
            10.0,
            n_steps,
            record_every,
            out_t,
            out_temps,
            out_heater,
            out_e1,
            out_e2,
        )
        assert status == 0

    return {"thermal_transient": best_of(run, repeats)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=262144, help="phase samples for Allan kernels")
    ap.add_argument("--steps", type=int, default=100000, help="RK4 steps for the thermal kernel")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    results = {}
    results["python"] = bench_allan(_pure, args.n, args.repeats)
    results["python"].update(bench_thermal(_pure, args.steps, args.repeats))
    if _core is not None:
        results["compiled"] = bench_allan(_core, args.n, args.repeats)
        results["compiled"].update(bench_thermal(_core, args.steps, args.repeats))

    kernels = list(results["python"])
    print(f"n = {args.n} samples, {args.steps} RK4 steps, best of {args.repeats}")
    header = f"{'kernel':<20} {'python':>12}"
    if "compiled" in results:
        header += f" {'compiled':>12} {'speedup':>9}"
    print(header)
    for k in kernels:
        tp = results["python"][k]
        line = f"{k:<20} {tp * 1e3:>10.2f}ms"
        if "compiled" in results:
            tc = results["compiled"][k]
            line += f" {tc * 1e3:>10.2f}ms {tp / tc:>8.1f}x"
        print(line)
    if _core is None:
        print("compiled extension not available; fallback timings only")


if __name__ == "__main__":
    main()
