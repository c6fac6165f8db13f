import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fresnel_ris import kernels

pure = kernels.get_backend("python")


def brute(px, py, cx, ax, by, n=200_000):
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return np.min(np.hypot(px - cx - ax * np.cos(t), py - by * np.sin(t)))


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.5, 4), st.floats(0.5, 4))
def test_python_kernel_matches_dense_sampling(px, py, ax, by):
    d = pure.ellipse_min_distance(np.array([px]), np.array([py]), 0.2, ax, by, n_grid=64)[0]
    assert d == pytest.approx(brute(px, py, 0.2, ax, by), abs=1e-6)


def test_point_on_curve_has_zero_distance():
    t = np.linspace(0, 6, 7)
    d = pure.ellipse_min_distance(1 + 3 * np.cos(t), 2 * np.sin(t), 1.0, 3.0, 2.0)
    assert np.max(d) < 1e-6


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@pytest.mark.skipif("cython" not in kernels.available_backends(), reason="extension not built")
def test_backends_agree():
    rng = np.random.default_rng(0)
    n = 5000
    cx, ax, by = rng.uniform(5, 8, n), rng.uniform(10, 13, n), rng.uniform(8, 11, n)
    px, py = rng.uniform(-1, 1, (2, n)) * 0.2
    a = pure.ellipse_min_distance(px, py, cx, ax, by, n_grid=64)
    b = kernels.get_backend("cython").ellipse_min_distance(px, py, cx, ax, by, n_grid=64)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)


def test_environment_forces_pure_python():
    code = "from fresnel_ris import kernels; print(kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={"FRESNEL_RIS_PURE_PYTHON": "1", "PATH": ""}, check=True)
    assert out.stdout.strip() == "python"
