"""Both kernel backends must agree with straightforward numpy reference
implementations and with each other."""

import os
import subprocess
import sys

import numpy as np
import pytest

from feudalgain import kernels
from feudalgain.kernels import pure

BACKENDS = [pure]
if kernels.BACKEND == "fast":
    from feudalgain.kernels import _fast
    BACKENDS.append(_fast)

RNG = np.random.default_rng(42)


def _arr(*shape):
    return np.ascontiguousarray(RNG.standard_normal(shape))


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND)
class TestBackend:
    def test_affine(self, backend):
        x, w, b = _arr(5, 7), _arr(4, 7), _arr(4)
        np.testing.assert_allclose(backend.affine(x, w, b), x @ w.T + b,
                                   rtol=1e-12)

    def test_affine_backward(self, backend):
        x, w, dy = _arr(5, 7), _arr(4, 7), _arr(5, 4)
        dx, dw, db = backend.affine_backward(x, w, dy)
        np.testing.assert_allclose(dx, dy @ w, rtol=1e-12)
        np.testing.assert_allclose(dw, dy.T @ x, rtol=1e-12)
        np.testing.assert_allclose(db, dy.sum(axis=0), rtol=1e-12)

    def test_relu_roundtrip(self, backend):
        z, dy = _arr(6, 3), _arr(6, 3)
        np.testing.assert_array_equal(backend.relu(z), np.maximum(z, 0.0))
        np.testing.assert_array_equal(backend.relu_backward(z, dy),
                                      np.where(z > 0, dy, 0.0))

    def test_tanh_roundtrip(self, backend):
        z, dy = _arr(6, 3), _arr(6, 3)
        y = backend.tanh(z)
        np.testing.assert_allclose(y, np.tanh(z), rtol=1e-12)
        np.testing.assert_allclose(backend.tanh_backward(y, dy),
                                   (1 - y * y) * dy, rtol=1e-12)

    def test_adam_step_matches_reference(self, backend):
        p, g = _arr(4, 3), _arr(4, 3)
        m, v = np.zeros((4, 3)), np.zeros((4, 3))
        p2, m2, v2 = p.copy(), m.copy(), v.copy()
        lr, b1, b2, eps = 1e-3, 0.9, 0.999, 1e-8
        for t in range(1, 6):
            backend.adam_step(p, g, m, v, t, lr, b1, b2, eps)
            m2 = b1 * m2 + (1 - b1) * g
            v2 = b2 * v2 + (1 - b2) * g * g
            p2 = p2 - lr * (m2 / (1 - b1 ** t)) / (
                np.sqrt(v2 / (1 - b2 ** t)) + eps)
        np.testing.assert_allclose(p, p2, rtol=1e-12)

    def test_js_divergence_basics(self, backend):
        p = np.array([0.5, 0.5, 0.0])
        assert backend.js_divergence(p, p) == pytest.approx(0.0, abs=1e-12)
        q = np.array([0.0, 0.0, 1.0])
        # disjoint supports give the maximum of 1 bit
        assert backend.js_divergence(p, q) == pytest.approx(1.0, abs=1e-12)


def test_backends_agree_on_js():
    if kernels.BACKEND != "fast":
        pytest.skip("compiled backend unavailable")
    from feudalgain.kernels import _fast
    rng = np.random.default_rng(7)
    for _ in range(200):
        p = rng.random(6)
        q = rng.random(6)
        p /= p.sum()
        q /= q.sum()
        assert _fast.js_divergence(p, q) == pytest.approx(
            pure.js_divergence(p, q), abs=1e-12)


def test_env_var_forces_pure_backend():
    code = ("import feudalgain.kernels as k; print(k.BACKEND)")
    env = dict(os.environ, FEUDALGAIN_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "pure"
