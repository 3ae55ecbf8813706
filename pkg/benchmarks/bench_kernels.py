"""Benchmark the numba kernels against the pure-NumPy fallback.

Runs each kernel in two subprocesses (one with FAITHSHAP_NO_NUMBA=1) and
prints a timing table.  Usage: python benchmarks/bench_kernels.py [d]
"""

import json
import os
import subprocess
import sys
import textwrap

SNIPPET = textwrap.dedent(
    """
    import json, time
    import numpy as np
    import faithshap._kernels as k

    d = {d}
    order = 2
    rng = np.random.default_rng(0)
    table = rng.normal(size=1 << d)
    from faithshap.coalitions import iter_size_masks
    s_masks = np.array(list(iter_size_masks(d, order)), dtype=np.int64)
    coeff = rng.random(d + 1)
    w = rng.random(d + 1)
    n, p = 4000, 120
    A = rng.normal(size=(n, p))
    y = rng.normal(size=n)
    G = np.ascontiguousarray(2.0 / n * (A.T @ A))
    c = np.ascontiguousarray(2.0 / n * (A.T @ y))
    z0 = np.zeros(p)

    def timeit(fn, *args, repeat=3):
        fn(*args)  # warmup / JIT
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn(*args)
            best = min(best, time.perf_counter() - t0)
        return best

    out = {{
        "path": "numba" if k.USING_NUMBA else "numpy",
        "subset_zeta": timeit(k.subset_zeta, table.copy(), d),
        "subset_mobius": timeit(k.subset_mobius, table.copy(), d),
        "superset_sum": timeit(k.superset_sum, table.copy(), d),
        "derivative_weighted_sums": timeit(k.derivative_weighted_sums, table, d, s_masks, coeff),
        "superset_weighted_sums": timeit(k.superset_weighted_sums, table, d, s_masks, w),
        "lasso_cd": timeit(k.lasso_cd, G, c, 1e-3, 2.0, 1, z0, 2000, 1e-9),
    }}
    print(json.dumps(out))
    """
)


def run(d: int, disable_numba: bool) -> dict:
    env = dict(os.environ)
    if disable_numba:
        env["FAITHSHAP_NO_NUMBA"] = "1"
    else:
        env.pop("FAITHSHAP_NO_NUMBA", None)
    proc = subprocess.run(
        [sys.executable, "-c", SNIPPET.format(d=d)], env=env, capture_output=True, text=True
    )
    if proc.returncode != 0:
        raise RuntimeError(proc.stderr)
    return json.loads(proc.stdout)


def main() -> None:
    d = int(sys.argv[1]) if len(sys.argv) > 1 else 16
    numba_times = run(d, disable_numba=False)
    numpy_times = run(d, disable_numba=True)
    kernels = [key for key in numba_times if key != "path"]
    print(f"kernel timings at d={d} (seconds, best of 3)")
    print(f"{'kernel':<28}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for key in kernels:
        a, b = numba_times[key], numpy_times[key]
        print(f"{key:<28}{a:>12.5f}{b:>12.5f}{b / a:>10.2f}x")


if __name__ == "__main__":
    main()
