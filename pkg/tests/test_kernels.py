import importlib
import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossfield import _kernels_py, kernels

try:
    from crossfield import _kernels
except ImportError:  # pragma: no cover - depends on the build
    _kernels = None

needs_compiled = pytest.mark.skipif(_kernels is None, reason="compiled extension not built")


@needs_compiled
def test_default_backend_is_compiled():
    if os.environ.get("CROSSFIELD_PURE_PYTHON", "") in ("", "0"):
        assert kernels.BACKEND == "compiled"


def test_env_var_selects_python_backend():
    code = "from crossfield import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, CROSSFIELD_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_compiled
@settings(max_examples=200, deadline=None)
@given(st.floats(0.5, 10.0), st.floats(-1.0, 1.0), st.sampled_from([1, 2, 3]), st.sampled_from([1, 2, 4]))
def test_ula_crossing_backends_agree(r, uy, method, k):
    lam = 3e8 / 100e9
    ux = math.sqrt(1 - uy * uy)
    args = (lam / 2, ux, uy, 0.0, r, lam, method, k, math.pi / 8, 512)
    assert _kernels.ula_crossing(*args) == _kernels_py.ula_crossing(*args)


@needs_compiled
def test_ula_crossing_golden_on_both():
    lam = 3e8 / 100e9
    u = math.sqrt(0.5)  # theta = 45 deg, phi = 0: direction (u, 0, u)
    for mod in (_kernels, _kernels_py):
        assert mod.ula_crossing(lam / 2, u, 0.0, u, 5.0, lam, 1, 1, math.pi / 8, 4096) == 59
        assert mod.ula_crossing(lam / 2, u, 0.0, u, 5.0, lam, 2, 1, math.pi / 8, 4096) == 881
        assert mod.ula_crossing(lam / 2, u, 0.0, u, 5.0, lam, 1, 1, math.pi / 8, 10) == -1


@needs_compiled
def test_solve_rr_batch_backends_agree():
    rng = np.random.default_rng(0)
    n = 500
    tx, rx = np.zeros(3), np.array([100.0, 0.0, -23.5])
    base = np.linalg.norm(rx - tx)
    u_t = rng.standard_normal((n, 3))
    u_t /= np.linalg.norm(u_t, axis=1, keepdims=True)
    u_r = rng.standard_normal((n, 3))
    u_r /= np.linalg.norm(u_r, axis=1, keepdims=True)
    total = base * (1.0 + rng.exponential(0.5, n))
    r_t = rng.uniform(0.05, 0.5, n) * (total - base)
    fbs = tx + r_t[:, None] * u_t
    a = _kernels.solve_rr_batch(tx, rx, fbs, u_r, r_t, total, 1e-12)
    b = _kernels_py.solve_rr_batch(tx, rx, fbs, u_r, r_t, total, 1e-12)
    np.testing.assert_array_equal(a, b)
    res = r_t + a + np.linalg.norm(fbs - (rx + a[:, None] * u_r), axis=1) - total
    assert np.all((a >= 0) & (a <= total))
    assert np.all(np.abs(res) <= 4e-12 * total)


def test_reload_is_stable():
    assert importlib.reload(kernels).BACKEND == kernels.BACKEND
