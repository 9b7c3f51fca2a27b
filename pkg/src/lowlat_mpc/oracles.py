"""Plain double-precision versions of the recurrences in ``nonlinear``.

These run the same iterations with the same constants on floats, so the
difference between an oracle and its secure counterpart is the error the
fixed-point protocols introduce. They deliberately import nothing from
the secure code paths.
"""
from __future__ import annotations

import numpy as np


def horner(coefficients, x):
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    for c in reversed(coefficients):
        acc = acc * x + c
    return acc


def exp(x, d=3, n=8):
    x = np.asarray(x, dtype=float)
    y = 1.0 + x / float(d ** n)
    for _ in range(n):
        y = y ** d
    return y


def exp_i(x, n=10):
    z = 1.0 + 1j * np.asarray(x, dtype=float) / 2.0 ** n
    for _ in range(n):
        z = z * z
    return z


def sin(x, n=10):
    return exp_i(x, n).imag


def cos(x, n=10):
    return exp_i(x, n).real


def reciprocal(x, iterations=10, d=3, n=8):
    x = np.asarray(x, dtype=float)
    y = 3.0 * exp(0.5 - x, d, n) + 0.003
    for _ in range(iterations):
        y = 2.0 * y - x * y * y
    return y


def log(x, iterations=2, order=8, d=3, n=8):
    x = np.asarray(x, dtype=float)
    y = x / 120.0 - 20.0 * exp(-(2.0 * x + 1.0), d, n) + 3.0
    coeffs = [0.0] + [1.0 / k for k in range(1, order + 1)]
    for _ in range(iterations):
        h = 1.0 - x * exp(-y, d, n)
        y = y - horner(coeffs, h)
    return y


def sigmoid(x, iterations=10, d=3, n=8):
    x = np.asarray(x, dtype=float)
    return reciprocal(1.0 + exp(-x, d, n), iterations, d, n)


def tanh(x, iterations=10, d=3, n=8):
    return 2.0 * sigmoid(2.0 * np.asarray(x, dtype=float), iterations, d, n) - 1.0


def softmax(x, iterations=10, d=3, n=8):
    e = exp(x, d, n)
    return e * reciprocal(e.sum(axis=-1), iterations, d, n)[..., None]


def from_config(name, cfg):
    """Oracle for ``name`` bound to the iteration counts of ``cfg``."""
    d, n = cfg.exp_base, cfg.exp_iterations
    table = {
        "exp": lambda x: exp(x, d, n),
        "log": lambda x: log(x, cfg.log_iterations, cfg.log_order, d, n),
        "reciprocal": lambda x: reciprocal(x, cfg.reciprocal_iterations, d, n),
        "sin": lambda x: sin(x, cfg.trig_iterations),
        "cos": lambda x: cos(x, cfg.trig_iterations),
        "sigmoid": lambda x: sigmoid(x, cfg.reciprocal_iterations, d, n),
        "tanh": lambda x: tanh(x, cfg.reciprocal_iterations, d, n),
        "softmax": lambda x: softmax(x, cfg.reciprocal_iterations, d, n),
    }
    return table[name]


TRUE = {
    "exp": np.exp,
    "log": np.log,
    "reciprocal": lambda x: 1.0 / np.asarray(x, dtype=float),
    "sin": np.sin,
    "cos": np.cos,
    "sigmoid": lambda x: 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=float))),
    "tanh": np.tanh,
    "softmax": lambda x: np.exp(x) / np.exp(x).sum(axis=-1, keepdims=True),
}
