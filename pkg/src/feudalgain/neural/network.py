"""Multi-head feed-forward networks built from the layer primitives."""

from __future__ import annotations

import numpy as np

from .layers import (DenseLayer, LayerError, NoisyLayer, dueling_combine,
                     dueling_combine_backward)


def make_layer(n_in: int, n_out: int, activation: str, noisy: bool,
               rng: np.random.Generator, sigma_init: float = 0.5):
    if noisy:
        return NoisyLayer(n_in, n_out, activation, rng, sigma_init)
    return DenseLayer(n_in, n_out, activation, rng)


class MLP:
    """A shared trunk feeding one or more linear heads."""

    def __init__(self, n_in: int, hidden: list[int], heads: dict[str, int],
                 noisy: bool = False, activation: str = "relu",
                 rng: np.random.Generator | None = None,
                 sigma_init: float = 0.5):
        rng = rng or np.random.default_rng()
        self.n_in = n_in
        self.trunk: list[DenseLayer] = []
        d = n_in
        for h in hidden:
            self.trunk.append(make_layer(d, h, activation, noisy, rng,
                                         sigma_init))
            d = h
        self.heads: dict[str, DenseLayer] = {
            name: make_layer(d, n_out, "identity", noisy, rng, sigma_init)
            for name, n_out in heads.items()
        }

    def _layers(self):
        yield from self.trunk
        yield from self.heads.values()

    def forward(self, x, mode: str = "mean",
                rng: np.random.Generator | None = None
                ) -> dict[str, np.ndarray]:
        h = x
        for layer in self.trunk:
            h = layer.forward(h, mode, rng)
        return {name: head.forward(h, mode, rng)
                for name, head in self.heads.items()}

    def backward(self, dheads: dict[str, np.ndarray]) -> np.ndarray:
        dh = None
        for name, dy in dheads.items():
            d = self.heads[name].backward(dy)
            dh = d if dh is None else dh + d
        if dh is None:
            raise LayerError("backward needs at least one head gradient")
        for layer in reversed(self.trunk):
            dh = layer.backward(dh)
        return dh

    def zero_grad(self):
        for layer in self._layers():
            layer.zero_grad()

    def project(self):
        for layer in self._layers():
            layer.project()

    def params(self) -> dict[str, np.ndarray]:
        out = {}
        for i, layer in enumerate(self.trunk):
            for key, arr in layer.params().items():
                out[f"trunk{i}.{key}"] = arr
        for name, head in self.heads.items():
            for key, arr in head.params().items():
                out[f"head.{name}.{key}"] = arr
        return out

    def grads(self) -> dict[str, np.ndarray]:
        out = {}
        for i, layer in enumerate(self.trunk):
            for key, arr in layer.grads().items():
                out[f"trunk{i}.{key}"] = arr
        for name, head in self.heads.items():
            for key, arr in head.grads().items():
                out[f"head.{name}.{key}"] = arr
        return out

    def set_params(self, values: dict[str, np.ndarray]):
        own = self.params()
        if set(own) != set(values):
            raise LayerError("parameter name mismatch while loading")
        for key, arr in own.items():
            src = np.asarray(values[key], dtype=np.float64)
            if src.shape != arr.shape:
                raise LayerError(f"shape mismatch for {key}")
            arr[...] = src

    def copy_from(self, other: "MLP"):
        self.set_params(other.params())


class DuelingQNetwork:
    """MLP with a state-value head and an advantage head."""

    def __init__(self, n_in: int, hidden: list[int], n_actions: int,
                 noisy: bool = False,
                 rng: np.random.Generator | None = None,
                 sigma_init: float = 0.5):
        self.n_actions = n_actions
        self.mlp = MLP(n_in, hidden, {"v": 1, "a": n_actions},
                       noisy=noisy, rng=rng, sigma_init=sigma_init)

    def q_values(self, x, mode: str = "mean",
                 rng: np.random.Generator | None = None) -> np.ndarray:
        out = self.mlp.forward(x, mode, rng)
        return dueling_combine(out["v"], out["a"])

    def backward_q(self, dq: np.ndarray) -> np.ndarray:
        dv, da = dueling_combine_backward(dq)
        return self.mlp.backward({"v": dv, "a": da})


class ActorCriticNetwork:
    """MLP producing policy logits and per-action Q-values."""

    def __init__(self, n_in: int, hidden: list[int], n_actions: int,
                 noisy: bool = False,
                 rng: np.random.Generator | None = None,
                 sigma_init: float = 0.5):
        self.n_actions = n_actions
        self.mlp = MLP(n_in, hidden, {"logits": n_actions, "q": n_actions},
                       noisy=noisy, rng=rng, sigma_init=sigma_init)

    def forward(self, x, mode: str = "mean",
                rng: np.random.Generator | None = None
                ) -> tuple[np.ndarray, np.ndarray]:
        out = self.mlp.forward(x, mode, rng)
        return out["logits"], out["q"]

    def backward(self, dlogits: np.ndarray, dq: np.ndarray) -> np.ndarray:
        return self.mlp.backward({"logits": dlogits, "q": dq})


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)
