"""Numpy implementations of the numeric kernels.

These are the reference versions; the compiled module in ``_fast.pyx``
mirrors the exact same signatures and semantics. All arrays are float64
and C-contiguous; weight matrices are laid out (out_dim, in_dim).
"""

import numpy as np

BACKEND = "pure"


def affine(x, w, b):
    return x @ w.T + b


def affine_backward(x, w, dy):
    dx = dy @ w
    dw = dy.T @ x
    db = dy.sum(axis=0)
    return dx, dw, db


def relu(x):
    return np.maximum(x, 0.0)


def relu_backward(z, dy):
    return np.where(z > 0.0, dy, 0.0)


def tanh(x):
    return np.tanh(x)


def tanh_backward(y, dy):
    return (1.0 - y * y) * dy


def adam_step(param, grad, m, v, t, lr, beta1, beta2, eps):
    """One bias-corrected adaptive-moment update, in place on param/m/v."""
    m *= beta1
    m += (1.0 - beta1) * grad
    v *= beta2
    v += (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1 ** t)
    v_hat = v / (1.0 - beta2 ** t)
    param -= lr * m_hat / (np.sqrt(v_hat) + eps)


def js_divergence(p, q):
    """Jensen-Shannon divergence with base-2 logs; 0 log 0 := 0."""
    m = 0.5 * (p + q)
    pm = p > 0.0
    qm = q > 0.0
    kl_pm = np.sum(p[pm] * np.log2(p[pm] / m[pm]))
    kl_qm = np.sum(q[qm] * np.log2(q[qm] / m[qm]))
    return 0.5 * (kl_pm + kl_qm)
