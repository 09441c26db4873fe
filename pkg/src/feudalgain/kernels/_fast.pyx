# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled numeric kernels; semantics identical to kernels.pure."""

import numpy as np

cimport numpy as cnp
from libc.math cimport log2, sqrt, tanh as ctanh

cnp.import_array()

BACKEND = "fast"


# matrix products stay on BLAS; hand-written loops cannot compete there
def affine(x, w, b):
    return np.dot(x, np.asarray(w).T) + b


def affine_backward(x, w, dy):
    dy = np.asarray(dy)
    dx = np.dot(dy, w)
    dw = np.dot(dy.T, x)
    db = dy.sum(axis=0)
    return dx, dw, db


def relu(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, d))
    cdef double[:, ::1] y = out
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(d):
            y[i, j] = x[i, j] if x[i, j] > 0.0 else 0.0
    return out


def relu_backward(double[:, ::1] z, double[:, ::1] dy):
    cdef Py_ssize_t n = z.shape[0], d = z.shape[1]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, d))
    cdef double[:, ::1] dz = out
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(d):
            dz[i, j] = dy[i, j] if z[i, j] > 0.0 else 0.0
    return out


def tanh(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, d))
    cdef double[:, ::1] y = out
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(d):
            y[i, j] = ctanh(x[i, j])
    return out


def tanh_backward(double[:, ::1] y, double[:, ::1] dy):
    cdef Py_ssize_t n = y.shape[0], d = y.shape[1]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, d))
    cdef double[:, ::1] dx = out
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(d):
            dx[i, j] = (1.0 - y[i, j] * y[i, j]) * dy[i, j]
    return out


def adam_step(cnp.ndarray param_a, cnp.ndarray grad_a, cnp.ndarray m_a,
              cnp.ndarray v_a, long t, double lr, double beta1, double beta2,
              double eps):
    cdef double[::1] param = param_a.reshape(-1)
    cdef double[::1] grad = grad_a.reshape(-1)
    cdef double[::1] m = m_a.reshape(-1)
    cdef double[::1] v = v_a.reshape(-1)
    cdef Py_ssize_t i, n = param.shape[0]
    cdef double c1 = 1.0 - beta1 ** t
    cdef double c2 = 1.0 - beta2 ** t
    cdef double g
    for i in range(n):
        g = grad[i]
        m[i] = beta1 * m[i] + (1.0 - beta1) * g
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g
        param[i] -= lr * (m[i] / c1) / (sqrt(v[i] / c2) + eps)


def js_divergence(double[::1] p, double[::1] q):
    cdef Py_ssize_t i, n = p.shape[0]
    cdef double acc = 0.0, mid
    for i in range(n):
        mid = 0.5 * (p[i] + q[i])
        if p[i] > 0.0:
            acc += 0.5 * p[i] * log2(p[i] / mid)
        if q[i] > 0.0:
            acc += 0.5 * q[i] * log2(q[i] / mid)
    return acc
