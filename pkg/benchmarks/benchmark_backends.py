"""Time the compiled kernels against the numpy fallback on pipeline-sized work.

Each kernel runs the same workload from identical starting state on both
backends; the report shows per-call wall time, speedup, and the worst
divergence between the two backends' results.

Usage: python3 benchmarks/benchmark_backends.py [--repeats N] [--quick]
"""

import argparse
import time

import numpy as np

from weldmon._kernels import compiled_available, get_impl


def one_hot(labels):
    t = np.zeros((labels.shape[0], 2))
    t[labels == 1, 0] = 1.0
    t[labels == 0, 1] = 1.0
    return t


def build_workloads(quick):
    rng = np.random.default_rng(0)
    n = 200 if quick else 1530
    n_train = 150 if quick else 1021
    series_len = 20_000 if quick else 100_000

    data = rng.normal(0, 1, (n, 50))
    train_x = rng.normal(0, 1, (n_train, 50))
    train_t = one_hot(rng.integers(0, 2, n_train))
    phi = rng.uniform(0, 1, (n_train, 95))  # feature columns; bias row lives in wout[0]

    workloads = {}

    series = rng.normal(25, 1.5, series_len)
    workloads["moving_average"] = {
        "state": lambda: (),
        "call": lambda impl: impl.moving_average(series, 201),
    }

    som_w0 = rng.uniform(-1, 1, (9, 50))
    coords = np.arange(9, dtype=np.intp)
    som_order = rng.permutation(n).astype(np.intp)
    workloads["som_epoch"] = {
        "state": lambda: (np.ascontiguousarray(som_w0.copy()),),
        "call": lambda impl, w: impl.som_epoch(w, data, som_order, 0.3, 5.0, coords),
    }

    topology = [50, 25, 25, 2]
    ws0 = [rng.uniform(-0.1, 0.1, (topology[i], topology[i + 1]))
           for i in range(len(topology) - 1)]
    bs0 = [np.zeros(topology[i + 1]) for i in range(len(topology) - 1)]
    mlp_order = rng.permutation(n_train).astype(np.intp)
    workloads["mlp_epoch"] = {
        "state": lambda: (
            [np.ascontiguousarray(w.copy()) for w in ws0],
            [b.copy() for b in bs0],
        ),
        "call": lambda impl, ws, bs: impl.mlp_epoch(ws, bs, train_x, train_t,
                                                    mlp_order, 0.3),
    }

    # lr kept small: dense uniform features make the per-pattern update
    # diverge at the pipeline's 0.3 start, which would benchmark inf/nan math
    wout0 = np.zeros((96, 2))
    workloads["linear_epoch"] = {
        "state": lambda: (np.ascontiguousarray(wout0.copy()),),
        "call": lambda impl, w: impl.linear_epoch(w, phi, train_t, mlp_order, 0.01,
                                                  0.3 / n_train),
    }
    return workloads


def run_once(impl, spec):
    state = spec["state"]()
    t0 = time.perf_counter()
    result = spec["call"](impl, *state)
    elapsed = time.perf_counter() - t0
    return elapsed, result, state


def divergence(a, b):
    """Worst absolute difference across returned value and mutated state."""

    def diff(x, y):
        return float(np.max(np.abs(np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64))))

    worst = 0.0 if a[1] is None else diff(a[1], b[1])
    flat_a = [x for part in a[2] for x in (part if isinstance(part, list) else [part])]
    flat_b = [x for part in b[2] for x in (part if isinstance(part, list) else [part])]
    for xa, xb in zip(flat_a, flat_b):
        worst = max(worst, diff(xa, xb))
    return worst


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="best-of-N timing")
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    backends = ["numpy"]
    if compiled_available():
        backends.append("compiled")
    else:
        print("note: compiled extension not built; timing the numpy fallback only")

    workloads = build_workloads(args.quick)
    rows = [("kernel", "numpy (ms)", "compiled (ms)", "speedup", "max |diff|")]
    for name, spec in workloads.items():
        best = {}
        last = {}
        for backend in backends:
            impl = get_impl(backend)
            times = []
            for _ in range(args.repeats):
                elapsed, result, state = run_once(impl, spec)
                times.append(elapsed)
                last[backend] = (elapsed, result, state)
            best[backend] = min(times)
        if "compiled" in best:
            speedup = f"{best['numpy'] / best['compiled']:.1f}x"
            compiled_ms = f"{best['compiled'] * 1e3:.2f}"
            diff = f"{divergence(last['numpy'], last['compiled']):.2e}"
        else:
            speedup, compiled_ms, diff = "-", "-", "-"
        rows.append((name, f"{best['numpy'] * 1e3:.2f}", compiled_ms, speedup, diff))

    widths = [max(len(r[c]) for r in rows) for c in range(5)]
    for row in rows:
        print("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))


if __name__ == "__main__":
    main()
