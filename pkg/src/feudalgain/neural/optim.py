"""Adaptive-moment optimiser over named parameter dicts."""

from __future__ import annotations

import numpy as np

from .. import kernels


class OptimiserError(RuntimeError):
    pass


class Adam:
    def __init__(self, lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}

    def step(self, params: dict[str, np.ndarray],
             grads: dict[str, np.ndarray]):
        """Update params in place from matching-named gradients."""
        self.t += 1
        for key, p in params.items():
            g = grads[key]
            if not np.all(np.isfinite(g)):
                raise OptimiserError(
                    f"non-finite gradient for {key!r}: "
                    f"min={np.nanmin(g)}, max={np.nanmax(g)}")
            if key not in self._m:
                self._m[key] = np.zeros_like(p)
                self._v[key] = np.zeros_like(p)
            kernels.adam_step(p, np.ascontiguousarray(g, dtype=np.float64),
                              self._m[key], self._v[key], self.t,
                              self.lr, self.beta1, self.beta2, self.eps)
