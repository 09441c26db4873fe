"""Feed-forward layers with reverse-mode gradients.

Weights are float64 and laid out (out_dim, in_dim). A layer caches the
inputs of its latest forward pass; backward() consumes that cache and
accumulates parameter gradients until zero_grad().
"""

from __future__ import annotations

import numpy as np

from .. import kernels

ACTIVATIONS = ("relu", "tanh", "identity")


class LayerError(RuntimeError):
    pass


def _as2d(x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    return x


class DenseLayer:
    """Affine map plus elementwise activation."""

    def __init__(self, n_in: int, n_out: int, activation: str = "identity",
                 rng: np.random.Generator | None = None):
        if activation not in ACTIVATIONS:
            raise LayerError(f"unknown activation {activation!r}")
        self.n_in = n_in
        self.n_out = n_out
        self.activation = activation
        rng = rng or np.random.default_rng()
        bound = 1.0 / np.sqrt(n_in)
        self.w = rng.uniform(-bound, bound, size=(n_out, n_in))
        self.b = rng.uniform(-bound, bound, size=n_out)
        self.zero_grad()
        self._cache = None

    def params(self) -> dict[str, np.ndarray]:
        return {"w": self.w, "b": self.b}

    def grads(self) -> dict[str, np.ndarray]:
        return {"w": self.dw, "b": self.db}

    def zero_grad(self):
        self.dw = np.zeros((self.n_out, self.n_in))
        self.db = np.zeros(self.n_out)

    def _weights(self, mode: str, rng) -> tuple[np.ndarray, np.ndarray]:
        return self.w, self.b

    def forward(self, x, mode: str = "mean",
                rng: np.random.Generator | None = None) -> np.ndarray:
        x = _as2d(x)
        if x.shape[1] != self.n_in:
            raise LayerError(
                f"input dim {x.shape[1]} != layer dim {self.n_in}")
        w, b = self._weights(mode, rng)
        z = kernels.affine(x, w, b)
        if self.activation == "relu":
            y = kernels.relu(z)
        elif self.activation == "tanh":
            y = kernels.tanh(z)
        else:
            y = z
        self._cache = (x, z, y, w)
        return y

    def backward(self, dy) -> np.ndarray:
        if self._cache is None:
            raise LayerError("backward before forward")
        x, z, y, w = self._cache
        dy = _as2d(dy)
        if self.activation == "relu":
            dz = kernels.relu_backward(z, dy)
        elif self.activation == "tanh":
            dz = kernels.tanh_backward(y, dy)
        else:
            dz = dy
        dx, dw, db = kernels.affine_backward(x, w, dz)
        self._accumulate(dw, db)
        return dx

    def _accumulate(self, dw, db):
        self.dw += dw
        self.db += db

    def project(self):
        pass


def _scale_noise(rng: np.random.Generator, n: int) -> np.ndarray:
    eps = rng.standard_normal(n)
    return np.sign(eps) * np.sqrt(np.abs(eps))


class NoisyLayer(DenseLayer):
    """Dense layer whose effective weights are mu + sigma * eps.

    Factorised Gaussian noise, resampled once per sample-mode forward
    pass; mean mode drops the noise entirely, so sigma = 0 reduces this
    layer to a DenseLayer.
    """

    def __init__(self, n_in: int, n_out: int, activation: str = "identity",
                 rng: np.random.Generator | None = None,
                 sigma_init: float = 0.5):
        super().__init__(n_in, n_out, activation, rng)
        self.sigma_w = np.full((n_out, n_in), sigma_init / np.sqrt(n_in))
        self.sigma_b = np.full(n_out, sigma_init / np.sqrt(n_in))
        self._eps_w = np.zeros((n_out, n_in))
        self._eps_b = np.zeros(n_out)
        self.zero_grad()

    def params(self) -> dict[str, np.ndarray]:
        return {"w": self.w, "b": self.b,
                "sigma_w": self.sigma_w, "sigma_b": self.sigma_b}

    def grads(self) -> dict[str, np.ndarray]:
        return {"w": self.dw, "b": self.db,
                "sigma_w": self.dsigma_w, "sigma_b": self.dsigma_b}

    def zero_grad(self):
        super().zero_grad()
        self.dsigma_w = np.zeros((self.n_out, self.n_in))
        self.dsigma_b = np.zeros(self.n_out)

    def _weights(self, mode: str, rng) -> tuple[np.ndarray, np.ndarray]:
        if mode == "mean":
            self._noisy = False
            return self.w, self.b
        if mode != "sample":
            raise LayerError(f"unknown noise mode {mode!r}")
        if rng is None:
            raise LayerError("sample mode needs an rng")
        eps_in = _scale_noise(rng, self.n_in)
        eps_out = _scale_noise(rng, self.n_out)
        self._eps_w = np.ascontiguousarray(np.outer(eps_out, eps_in))
        self._eps_b = eps_out
        self._noisy = True
        w = np.ascontiguousarray(self.w + self.sigma_w * self._eps_w)
        b = np.ascontiguousarray(self.b + self.sigma_b * self._eps_b)
        return w, b

    def _accumulate(self, dw, db):
        super()._accumulate(dw, db)
        if self._noisy:
            self.dsigma_w += dw * self._eps_w
            self.dsigma_b += db * self._eps_b

    def project(self):
        np.clip(self.sigma_w, 0.0, None, out=self.sigma_w)
        np.clip(self.sigma_b, 0.0, None, out=self.sigma_b)


def dueling_combine(v, a) -> np.ndarray:
    """Q = V + A - mean(A), batched or plain vectors."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        return float(np.asarray(v).reshape(())) + a - a.mean()
    v = np.asarray(v, dtype=np.float64).reshape(-1, 1)
    return v + a - a.mean(axis=1, keepdims=True)


def dueling_combine_backward(dq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of the dueling combination wrt (V, A)."""
    dq = _as2d(dq)
    dv = dq.sum(axis=1, keepdims=True)
    da = dq - dq.sum(axis=1, keepdims=True) / dq.shape[1]
    return dv, da
