#!/usr/bin/env python3
"""Compare the compiled and pure-numpy kernels on realistic workloads.

Times the three hot kernels on matrices taken from actual stiffness
assemblies, then a full manufactured-case solve per backend.  The first
compiled call includes numba's compilation (cached on disk afterwards), so a
throwaway warmup call runs before any timer starts.
"""

import argparse
import time

import numpy as np

from ncstokes.backends import get_backend
from ncstokes.divfree import assemble_load, assemble_stiffness
from ncstokes.harness import solve_case, stokes_case
from ncstokes.mesh import RED, build_rectangular, color_bfs_tree
from ncstokes.solver import SolverConfig


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best * 1e3


TOL = 1e-8  # reachable at every size; tighter targets stagnate around n=256


def bench_level(n, backends, repeats):
    mesh = build_rectangular(n, n, 1.0 / n)
    case = stokes_case()
    K = assemble_stiffness(mesh, RED)
    b = assemble_load(mesh, case.forcing, RED)
    x = np.linspace(-1.0, 1.0, K.n)
    inv_diag = 1.0 / K.diagonal()

    nodes, tree_order, tree_parents = color_bfs_tree(mesh, RED)
    steps = np.sin(np.arange(len(nodes), dtype=np.float64))
    steps[tree_order[0]] = 0.0

    rows = []
    for backend in backends:
        # warmup (numba compiles here on a cold cache)
        backend.csr_matvec(K.indptr, K.indices, K.data, x)
        backend.pcg(K.indptr, K.indices, K.data, b, inv_diag, TOL, 50_000)
        backend.path_sum(tree_parents, steps, tree_order)

        matvec = time_call(
            lambda: backend.csr_matvec(K.indptr, K.indices, K.data, x), repeats
        )
        pcg = time_call(
            lambda: backend.pcg(
                K.indptr, K.indices, K.data, b, inv_diag, TOL, 50_000
            ),
            repeats,
        )
        sweep = time_call(
            lambda: backend.path_sum(tree_parents, steps, tree_order), repeats
        )
        solve = time_call(
            lambda: solve_case(
                mesh, case, SolverConfig(backend=backend.name, tol=TOL)
            ),
            max(1, repeats // 2),
        )
        rows.append((backend.name, matvec, pcg, sweep, solve))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--sizes", default="64,128", help="comma-separated mesh sizes"
    )
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = [get_backend("numpy"), get_backend("numba")]
    header = f"{'n':>5} {'backend':>8} {'matvec ms':>10} {'pcg ms':>10} {'sweep ms':>10} {'solve ms':>10}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        for name, matvec, pcg, sweep, solve in bench_level(n, backends, args.repeats):
            print(
                f"{n:>5} {name:>8} {matvec:>10.3f} {pcg:>10.2f} {sweep:>10.3f} {solve:>10.1f}"
            )


if __name__ == "__main__":
    main()
