"""Benchmark the JIT-compiled kernels against the pure-numpy fallback.

Runs the full Monte Carlo pipeline (nearest-neighbour association,
radius queries for nulling requests, interference sums) with both kernel
backends and reports per-realization wall time.  The numba backend is
selected by default; setting HETNET_IN_NO_NUMBA=1 forces the fallback.

Usage:  python3 benchmarks/bench_kernels.py [n_realizations]
"""

import json
import os
import subprocess
import sys
import time

_WORKER = """
import json, sys, time
import numpy as np
from hetnet_in.model import NetworkParams, ContentConfig, CachingPolicy
from hetnet_in import simulator as S

n_real = int(sys.argv[1])
net = NetworkParams(1e-4, 5e-4, 0.01, 8, 6, 8, 2, 4.0, 4.0, 1.0)
content = ContentConfig.from_zipf(12, 0.8, 4, 3, 2)
policy = CachingPolicy((5, 6, 7, 8), np.array([0.9, 0.8, 0.7, 0.6]), 1.4)

# warm-up (includes any JIT compilation)
S.estimate(net, content, policy, S.SimConfig(n_realizations=2, seed=0))

t0 = time.perf_counter()
est = S.estimate(net, content, policy,
                 S.SimConfig(n_realizations=n_real, seed=1))
dt = time.perf_counter() - t0
print(json.dumps({"wall_s": dt, "per_realization_ms": 1e3 * dt / n_real,
                  "q2_hat": est.q2_hat}))
"""


def run(backend_flag: str, n_real: int) -> dict:
    env = dict(os.environ, HETNET_IN_NO_NUMBA=backend_flag)
    out = subprocess.run([sys.executable, "-c", _WORKER, str(n_real)],
                         capture_output=True, text=True, env=env, check=True)
    return json.loads(out.stdout)


def main():
    n_real = int(sys.argv[1]) if len(sys.argv) > 1 else 200
    print(f"realizations per backend: {n_real}")
    numba = run("0", n_real)
    numpy_ = run("1", n_real)
    print(f"numba backend : {numba['wall_s']:8.2f} s total, "
          f"{numba['per_realization_ms']:7.2f} ms/realization")
    print(f"numpy fallback: {numpy_['wall_s']:8.2f} s total, "
          f"{numpy_['per_realization_ms']:7.2f} ms/realization")
    print(f"speedup: {numpy_['wall_s'] / numba['wall_s']:.2f}x")
    match = numba["q2_hat"] == numpy_["q2_hat"]
    print(f"identical q2 estimate: {match}")
    if not match:
        raise SystemExit("backend mismatch: estimates differ")


if __name__ == "__main__":
    main()
