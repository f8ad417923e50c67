"""Evaluation backend selection and numerical equivalence of the two lanes."""

import os
import subprocess
import sys

import numpy as np
import pytest

import hierdde as h
from hierdde import _backend


def _random_batch(rng):
    d = int(rng.integers(1, 5))
    n = int(rng.integers(1, 4))
    mats = (rng.standard_normal((n + 1, d, d))
            + 1j * rng.standard_normal((n + 1, d, d)))
    taus = np.sort(rng.uniform(0.5, 20.0, n))
    lams = (rng.uniform(-0.2, 0.2, 16) + 1j * rng.uniform(-3, 3, 16)).astype(complex)
    return lams, mats, taus


def test_backend_name_valid():
    assert _backend.backend_name() in ("numpy", "numba")


def test_compiled_lane_matches_plain_numpy():
    if not (_backend.HAS_NUMBA and _backend.backend_name() == "numba"):
        pytest.skip("compiled lane not active")
    rng = np.random.default_rng(2121)
    for _ in range(10):
        lams, mats, taus = _random_batch(rng)
        va = _backend._char_values_numba(lams, mats, taus)
        vb = _backend._char_values_numpy(lams, mats, taus)
        scale = 1.0 + np.abs(vb)
        assert np.all(np.abs(va - vb) <= 1e-12 * scale)
        fa, da = _backend._char_and_deriv_numba(lams, mats, taus)
        fb, db = _backend._char_and_deriv_numpy(lams, mats, taus)
        assert np.all(np.abs(fa - fb) <= 1e-12 * (1.0 + np.abs(fb)))
        assert np.all(np.abs(da - db) <= 1e-11 * (1.0 + np.abs(db)))


def test_dispatcher_value_example():
    lams = np.array([0.5 + 0.0j])
    mats = np.array([[[0.0]], [[1.0]]], dtype=complex)
    taus = np.array([1.0])
    v = _backend.char_values(lams, mats, taus)
    assert v[0] == pytest.approx(-0.5 + np.exp(-0.5), abs=1e-14)
    f, fp = _backend.char_and_deriv(lams, mats, taus)
    assert fp[0] == pytest.approx(-1.0 - np.exp(-0.5), abs=1e-12)


def test_env_flag_selects_numpy_lane():
    code = ("from hierdde import _backend; print(_backend.backend_name())")
    env = dict(os.environ, HIERDDE_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_env_flag_rejects_unknown_lane():
    code = ("from hierdde import _backend; _backend.backend_name()")
    env = dict(os.environ, HIERDDE_BACKEND="cuda")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True)
    assert out.returncode != 0


def test_derivative_fallback_where_matrix_is_singular():
    # at a root the characteristic matrix is singular, so the trace formula
    # is unusable and the difference fallback must take over seamlessly
    s = h.DelaySystem.scalar(0.0, (1.0,))
    lam = 0.567143290409784 + 0.0j
    assert abs(h.char_value(s, 1.0, lam)) <= 1e-14
    dv = h.char_derivative(s, 1.0, lam)
    want = -1.0 - np.exp(-lam)
    assert dv == pytest.approx(want, rel=1e-6)
