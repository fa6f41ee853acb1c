"""Compare the compiled and numpy kernels on the two hot paths.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints one line per (workload, backend) with the best wall time and the
speedup of the compiled kernel over the fallback.
"""

import argparse
import time

import numpy as np

from meplsim._kernels import available_backends
from meplsim.distributions import clustered_distribution, random_activities, uniform_cluster_spec
from meplsim.dynamics import DynamicsConfig, run_dynamics
from meplsim.oracle import local_minima
from meplsim.placement import Placement
from meplsim.topology import grid, torus


def enum_grid(k):
    d = random_activities(9, "dirichlet", seed=1)
    local_minima(grid(2, 3), d, "C", "adjacent+knight", kernels=k)


def enum_line_batch(k):
    from meplsim.topology import line
    for s in range(20):
        local_minima(line(7), random_activities(7, "dirichlet", seed=s), "C", "adjacent", kernels=k)


def dyn_torus_product(k):
    t = torus(2, 20)
    d = random_activities(t.n, "zipf", s=1.0)
    run_dynamics(t, d, Placement.random(t.n, np.random.default_rng(0)), DynamicsConfig(rule="C"), kernels=k)


def dyn_torus_clusters(k):
    t = torus(2, 30)
    d = clustered_distribution(uniform_cluster_spec(t.n, 16))
    run_dynamics(t, d, Placement.random(t.n, np.random.default_rng(0)), DynamicsConfig(), kernels=k)


WORKLOADS = {
    "enumerate 3x3 grid, 9 active, C-rule knight": enum_grid,
    "enumerate 20 lines of 7, C-rule": enum_line_batch,
    "dynamics 20x20 torus, product, C-rule": dyn_torus_product,
    "dynamics 30x30 torus, 16 clusters, M-rule": dyn_torus_clusters,
}


def best_of(fn, k, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(k)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = available_backends()
    for name, fn in WORKLOADS.items():
        res = {b: best_of(fn, k, args.repeat if b == "cython" else 1) for b, k in backends.items()}
        line = f"{name:48s} " + "  ".join(f"{b}={t:8.3f}s" for b, t in res.items())
        if len(res) == 2:
            line += f"  speedup x{res['python'] / res['cython']:.1f}"
        print(line, flush=True)


if __name__ == "__main__":
    main()
