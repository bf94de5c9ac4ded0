"""Timing comparison of the compiled and pure-numpy kernel backends.

The backend is chosen at import time from the FHCOMP_NUMBA environment
variable, so each backend is timed in a child process. Run:

    python3 benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys
import time

import numpy as np


def _bench_one(label, fn, repeats=20):
    fn()  # warm-up (includes JIT compilation when enabled)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return {"kernel": label, "best_ms": min(times) * 1e3,
            "mean_ms": float(np.mean(times)) * 1e3}


def run_child():
    from fhcomp._kernels import slot_bits, slot_latencies, tree_find_many, tree_set_many
    from fhcomp.backend import backend_name

    rng = np.random.default_rng(0)
    n_slots, k = 20_000, 3
    n_prb = rng.integers(1, 274, size=(n_slots, k)).astype(np.int64)
    q = np.array([6, 8, 6], dtype=np.int64)
    b = np.array([16, 19, 22], dtype=np.int64)
    r = np.array([4, 2, 1], dtype=np.int64)

    payload, weight = slot_bits(n_prb, q, b, r, 168, 12, 64)
    total = (payload + weight).sum(axis=1).astype(np.float64)
    jitter = rng.uniform(0, 5e-6, size=n_slots)

    capacity = 1 << 17
    tree = np.zeros(2 * capacity)
    idx = rng.integers(0, 100_000, size=4096)
    prios = rng.uniform(0.1, 5.0, size=4096)
    tree_set_many(tree, capacity, idx, prios)
    targets = rng.uniform(0, tree[1], size=4096)

    results = [
        _bench_one("slot_bits(20000x3)",
                   lambda: slot_bits(n_prb, q, b, r, 168, 12, 64)),
        _bench_one("slot_latencies(20000)",
                   lambda: slot_latencies(total, 25e9, 0.5, 10e-6, jitter)),
        _bench_one("tree_set_many(4096)",
                   lambda: tree_set_many(tree, capacity, idx, prios)),
        _bench_one("tree_find_many(4096)",
                   lambda: tree_find_many(tree, capacity, targets.copy())),
    ]
    print(json.dumps({"backend": backend_name(), "results": results}))


def main():
    if os.environ.get("_FHCOMP_BENCH_CHILD"):
        run_child()
        return
    reports = {}
    for flag in ("0", "1"):
        env = dict(os.environ, FHCOMP_NUMBA=flag, _FHCOMP_BENCH_CHILD="1")
        out = subprocess.run([sys.executable, __file__], env=env,
                             capture_output=True, text=True, check=True)
        doc = json.loads(out.stdout.strip().splitlines()[-1])
        reports[doc["backend"]] = doc["results"]

    print(f"{'kernel':<28}", end="")
    for backend in reports:
        print(f"{backend + ' best ms':>18}", end="")
    print(f"{'speedup':>10}")
    backends = list(reports)
    for i, row in enumerate(reports[backends[0]]):
        print(f"{row['kernel']:<28}", end="")
        times = []
        for backend in backends:
            t = reports[backend][i]["best_ms"]
            times.append(t)
            print(f"{t:>18.3f}", end="")
        print(f"{times[0] / times[-1]:>9.2f}x")


if __name__ == "__main__":
    main()
