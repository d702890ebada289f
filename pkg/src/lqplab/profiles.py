"""Smooth one-dimensional profiles shared by the witnesses and the deformations.

The basic building block is ``psi(t) = exp(-1/t)`` for ``t > 0`` (zero
otherwise) and the smooth step ``S(t) = psi(t) / (psi(t) + psi(1 - t))``,
which is 0 for ``t <= 0``, 1 for ``t >= 1``, infinitely differentiable and
strictly increasing on ``(0, 1)`` with maximal slope ``S'(1/2) = 2``.
"""

import numpy as np


def _psi(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _dpsi(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos]) / t[pos] ** 2
    return out


def smooth_step(t) -> np.ndarray:
    """Smooth monotone step from 0 (t <= 0) to 1 (t >= 1)."""
    t = np.asarray(t, dtype=float)
    a = _psi(t)
    b = _psi(1.0 - t)
    return a / (a + b)


def smooth_step_derivative(t) -> np.ndarray:
    """Derivative of :func:`smooth_step`."""
    t = np.asarray(t, dtype=float)
    a, b = _psi(t), _psi(1.0 - t)
    da, db = _dpsi(t), _dpsi(1.0 - t)
    return (da * b + a * db) / (a + b) ** 2


def bump(u) -> np.ndarray:
    """Unnormalized bump ``exp(-1/(1 - u^2))`` supported in ``|u| < 1``.

    ``u`` may be a scalar radius or an array of radii.
    """
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


__all__ = ["smooth_step", "smooth_step_derivative", "bump"]
