"""Gradient checks, dueling combination, noisy layers, and the optimiser."""

import numpy as np
import pytest

from feudalgain.neural.layers import (
    LayerError,
    NoisyLayer,
    dueling_combine,
    dueling_combine_backward,
)
from feudalgain.neural.network import MLP, DuelingQNetwork, softmax
from feudalgain.neural.optim import Adam, OptimiserError

STEP = 1e-5
REL_TOL = 1e-4


def _random_config(seed):
    rng = np.random.default_rng(seed)
    n_in = int(rng.integers(2, 9))
    hidden = [int(rng.integers(3, 10))
              for _ in range(int(rng.integers(1, 3)))]
    heads = {"out": int(rng.integers(1, 5))}
    if rng.random() < 0.5:
        heads["aux"] = int(rng.integers(1, 4))
    activation = ("relu", "tanh")[int(rng.integers(2))]
    noisy = bool(rng.integers(2))
    return n_in, hidden, heads, activation, noisy, rng


def _loss_and_grads(mlp, x, weights, mode, noise_seed):
    # a fresh generator per call keeps the sampled noise identical, which
    # finite differencing needs
    rng = np.random.default_rng(noise_seed) if mode == "sample" else None
    out = mlp.forward(x, mode, rng)
    return sum(float(np.sum(weights[name] * y)) for name, y in out.items())


@pytest.mark.parametrize("seed", range(24))
def test_gradient_check(seed):
    """Analytic gradients match central finite differences on random nets."""
    n_in, hidden, heads, activation, noisy, rng = _random_config(seed)
    mlp = MLP(n_in, hidden, heads, noisy=noisy, activation=activation,
              rng=rng)
    x = rng.standard_normal((3, n_in))
    weights = {name: rng.standard_normal((3, n))
               for name, n in heads.items()}
    mode = "sample" if noisy else "mean"
    noise_seed = seed + 1000

    mlp.zero_grad()
    out = mlp.forward(x, mode,
                      np.random.default_rng(noise_seed) if noisy else None)
    mlp.backward(dict(weights))
    analytic = mlp.grads()
    params = mlp.params()

    checked = 0
    for key, arr in params.items():
        flat = arr.reshape(-1)
        idx = np.random.default_rng(seed + 7).choice(
            flat.size, size=min(4, flat.size), replace=False)
        for i in idx:
            orig = flat[i]
            flat[i] = orig + STEP
            up = _loss_and_grads(mlp, x, weights, mode, noise_seed)
            flat[i] = orig - STEP
            down = _loss_and_grads(mlp, x, weights, mode, noise_seed)
            flat[i] = orig
            numeric = (up - down) / (2 * STEP)
            a = analytic[key].reshape(-1)[i]
            denom = max(abs(a), abs(numeric), 1.0)
            assert abs(a - numeric) / denom < REL_TOL, (
                f"{key}[{i}]: analytic={a}, numeric={numeric}")
            checked += 1
    assert checked > 0
    assert out["out"].shape == (3, heads["out"])


class TestDuelingCombine:
    def test_worked_examples(self):
        np.testing.assert_allclose(
            dueling_combine(np.array([1.0]), np.array([2.0, 0.0, -2.0])),
            [3.0, 1.0, -1.0])
        np.testing.assert_allclose(
            dueling_combine(np.array([0.5]), np.array([1.0, 2.0])),
            [0.0, 1.0])

    def test_identifiability(self):
        """Adding a constant to every advantage leaves Q unchanged."""
        rng = np.random.default_rng(3)
        v = rng.standard_normal((5, 1))
        a = rng.standard_normal((5, 7))
        q = dueling_combine(v, a)
        np.testing.assert_allclose(dueling_combine(v, a + 13.7), q,
                                   atol=1e-12)
        # and the mean advantage is pinned to zero inside Q
        np.testing.assert_allclose((q - v).mean(axis=1), 0.0, atol=1e-12)

    def test_backward_matches_finite_differences(self):
        rng = np.random.default_rng(4)
        v = rng.standard_normal((2, 1))
        a = rng.standard_normal((2, 5))
        dq = rng.standard_normal((2, 5))
        dv, da = dueling_combine_backward(dq)
        for arr, grad in ((v, dv), (a, da)):
            flat = arr.reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + STEP
                up = float(np.sum(dq * dueling_combine(v, a)))
                flat[i] = orig - STEP
                down = float(np.sum(dq * dueling_combine(v, a)))
                flat[i] = orig
                numeric = (up - down) / (2 * STEP)
                assert grad.reshape(-1)[i] == pytest.approx(numeric,
                                                            abs=1e-6)

    def test_q_network_end_to_end(self):
        rng = np.random.default_rng(5)
        net = DuelingQNetwork(4, [8], 3, rng=rng)
        q = net.q_values(rng.standard_normal((2, 4)))
        assert q.shape == (2, 3)


class TestNoisyLayer:
    def test_sigma_initialisation(self):
        layer = NoisyLayer(16, 4, rng=np.random.default_rng(0),
                           sigma_init=0.5)
        np.testing.assert_allclose(layer.sigma_w, 0.5 / 4.0)
        np.testing.assert_allclose(layer.sigma_b, 0.5 / 4.0)

    def test_mean_mode_ignores_noise(self):
        rng = np.random.default_rng(1)
        layer = NoisyLayer(3, 2, rng=rng)
        x = rng.standard_normal((4, 3))
        np.testing.assert_array_equal(layer.forward(x, "mean"),
                                      layer.forward(x, "mean"))

    def test_sample_mode_varies_with_noise(self):
        rng = np.random.default_rng(2)
        layer = NoisyLayer(3, 2, rng=rng)
        x = rng.standard_normal((4, 3))
        y1 = layer.forward(x, "sample", np.random.default_rng(10))
        y2 = layer.forward(x, "sample", np.random.default_rng(11))
        assert not np.array_equal(y1, y2)

    def test_zero_sigma_reduces_to_dense(self):
        rng = np.random.default_rng(3)
        layer = NoisyLayer(3, 2, rng=rng)
        layer.sigma_w[:] = 0.0
        layer.sigma_b[:] = 0.0
        x = rng.standard_normal((4, 3))
        np.testing.assert_allclose(
            layer.forward(x, "sample", np.random.default_rng(0)),
            layer.forward(x, "mean"), atol=1e-12)

    def test_sample_mode_requires_rng(self):
        layer = NoisyLayer(3, 2, rng=np.random.default_rng(4))
        with pytest.raises(LayerError):
            layer.forward(np.zeros((1, 3)), "sample", None)

    def test_project_clips_sigma_nonnegative(self):
        layer = NoisyLayer(3, 2, rng=np.random.default_rng(5))
        layer.sigma_w[0, 0] = -0.3
        layer.project()
        assert layer.sigma_w[0, 0] == 0.0
        assert np.all(layer.sigma_w >= 0.0)


class TestAdam:
    def test_first_step_magnitude_is_lr(self):
        """With fresh moments the first update is lr * sign(g) (eps aside)."""
        opt = Adam(lr=1e-3)
        p = {"w": np.array([1.0, -2.0, 3.0])}
        g = {"w": np.array([0.5, -0.1, 2.0])}
        before = p["w"].copy()
        opt.step(p, g)
        np.testing.assert_allclose(before - p["w"],
                                   1e-3 * np.sign(g["w"]), rtol=1e-6)

    def test_rejects_nan_gradient(self):
        opt = Adam()
        with pytest.raises(OptimiserError):
            opt.step({"w": np.ones(2)}, {"w": np.array([1.0, np.nan])})

    def test_converges_on_quadratic(self):
        opt = Adam(lr=0.05)
        p = {"w": np.array([4.0, -3.0])}
        for _ in range(500):
            opt.step(p, {"w": 2 * p["w"]})
        assert np.all(np.abs(p["w"]) < 1e-2)


def test_softmax_normalised_and_shift_invariant():
    rng = np.random.default_rng(6)
    logits = rng.standard_normal((5, 4)) * 10
    s = softmax(logits)
    np.testing.assert_allclose(s.sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(softmax(logits + 100.0), s, atol=1e-12)
