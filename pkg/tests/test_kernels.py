"""Both kernel paths (numba and pure NumPy) must compute identical values."""

import json
import os
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from faithshap import _kernels


def _fallback_env():
    env = dict(os.environ)
    env["FAITHSHAP_NO_NUMBA"] = "1"
    return env


def test_env_flag_selects_numpy_path():
    code = "import faithshap._kernels as k; print(k.USING_NUMBA)"
    out = subprocess.run(
        [sys.executable, "-c", code], env=_fallback_env(), capture_output=True, text=True
    )
    assert out.stdout.strip() == "False"


def test_paths_agree_on_reference_values():
    """Run the NumPy path in a subprocess and compare against the active path."""
    d = 8
    rng = np.random.default_rng(123)
    table = rng.normal(size=1 << d)
    s_masks = np.array([0, 1, 3, 5, 12, 96], dtype=np.int64)
    coeff = rng.random(d + 1)
    w = rng.random(d + 1)

    here = {
        "zeta": _kernels.subset_zeta(table.copy(), d).tolist(),
        "mobius": _kernels.subset_mobius(table.copy(), d).tolist(),
        "superset": _kernels.superset_sum(table.copy(), d).tolist(),
        "deriv": _kernels.derivative_weighted_sums(table, d, s_masks, coeff).tolist(),
        "tails": _kernels.superset_weighted_sums(table, d, s_masks, w).tolist(),
    }

    code = textwrap.dedent(
        """
        import json, sys
        import numpy as np
        import faithshap._kernels as k
        assert not k.USING_NUMBA
        d = 8
        rng = np.random.default_rng(123)
        table = rng.normal(size=1 << d)
        s_masks = np.array([0, 1, 3, 5, 12, 96], dtype=np.int64)
        coeff = rng.random(d + 1)
        w = rng.random(d + 1)
        print(json.dumps({
            "zeta": k.subset_zeta(table.copy(), d).tolist(),
            "mobius": k.subset_mobius(table.copy(), d).tolist(),
            "superset": k.superset_sum(table.copy(), d).tolist(),
            "deriv": k.derivative_weighted_sums(table, d, s_masks, coeff).tolist(),
            "tails": k.superset_weighted_sums(table, d, s_masks, w).tolist(),
        }))
        """
    )
    out = subprocess.run(
        [sys.executable, "-c", code], env=_fallback_env(), capture_output=True, text=True
    )
    assert out.returncode == 0, out.stderr
    there = json.loads(out.stdout)
    for key in here:
        assert np.allclose(here[key], there[key], atol=1e-10), key


def test_lasso_paths_agree():
    rng = np.random.default_rng(5)
    n, p = 60, 9
    A = rng.normal(size=(n, p))
    w = rng.uniform(0.5, 2.0, size=n)
    y = rng.normal(size=n)
    Aw = A * w[:, None]
    G = np.ascontiguousarray(2.0 / n * (Aw.T @ A))
    c = np.ascontiguousarray(2.0 / n * (Aw.T @ y))
    z0 = np.zeros(p)
    args = (G, c, 0.05, 1.3, 1, z0, 100_000, 1e-12)
    z_np, _ = _kernels._lasso_cd_np(*args)
    z_active, _ = _kernels.lasso_cd(*args)
    assert np.allclose(z_np, z_active, atol=1e-8)
    args0 = (G, c, 0.02, 0.0, 0, z0, 100_000, 1e-12)
    z_np0, _ = _kernels._lasso_cd_np(*args0)
    z_active0, _ = _kernels.lasso_cd(*args0)
    assert np.allclose(z_np0, z_active0, atol=1e-8)


def test_popcount_table():
    pc = _kernels.popcount_table(10)
    assert pc[0] == 0 and pc[(1 << 10) - 1] == 10
    idx = np.arange(1 << 10)
    expected = np.array([int(i).bit_count() for i in idx])
    assert np.array_equal(pc, expected)
