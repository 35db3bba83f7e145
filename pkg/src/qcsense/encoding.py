"""Pixel-to-qubit embedding of gray-scale signals."""
from __future__ import annotations

import numpy as np

from qcsense.errors import InvalidArgumentError
from qcsense.statevector import QuantumState, product_state


def check_midpoint(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise InvalidArgumentError(f"midpoint must lie strictly inside (0, 1), got {p}")
    return p


def as_signal(y) -> np.ndarray:
    """Validate a signal: a 1-D vector with every pixel in [0, 1]."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise InvalidArgumentError("a signal must be a non-empty vector")
    if np.any(~np.isfinite(y)) or np.any(y < 0.0) or np.any(y > 1.0):
        raise InvalidArgumentError("pixel values must lie in [0, 1]")
    return y


def remap_midpoint(x, p: float):
    """Smooth monotone rescaling of [0, 1] that sends ``p`` to 0.5.

    Works elementwise on arrays. The endpoints are pinned to 0 and 1 since
    the tangent diverges there.
    """
    p = check_midpoint(p)
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise InvalidArgumentError("pixel values must lie in [0, 1]")
    interior = (x > 0.0) & (x < 1.0)
    xi = np.where(interior, x, 0.5)
    shift = np.tan(np.pi * (xi - 0.5)) - np.tan(np.pi * (p - 0.5))
    f = 0.5 * (1.0 + (2.0 / np.pi) * np.arctan(shift))
    f = np.where(interior, f, x)
    return float(f) if f.ndim == 0 else f


def qubit_angles(y, p: float) -> np.ndarray:
    """Half-angles ``pi/2 * f_p(y_i)``; qubit ``i`` is ``cos|0> + sin|1>``."""
    return 0.5 * np.pi * np.atleast_1d(remap_midpoint(as_signal(y), p))


def qubit_amplitudes(y, p: float):
    """``(cos, sin)`` of the half-angles, exact at binary pixels."""
    f = np.atleast_1d(remap_midpoint(as_signal(y), p))
    half = 0.5 * np.pi * f
    cos = np.where(f == 1.0, 0.0, np.cos(half))
    sin = np.where(f == 0.0, 0.0, np.sin(half))
    return cos, sin


def encode_signal(y, p: float = 0.5) -> QuantumState:
    cos, sin = qubit_amplitudes(y, p)
    return product_state(list(zip(cos, sin)))


def encoded_amplitudes(y, p: float = 0.5) -> np.ndarray:
    """Real amplitude vector of :func:`encode_signal`, without the state wrapper."""
    return encode_signal(y, p).amplitudes.real


def best_binary_image(y, p: float = 0.5) -> tuple:
    """Bit ``i`` is 0 iff ``y_i < p``; ties go to 1."""
    y = as_signal(y)
    p = check_midpoint(p)
    return tuple(int(v >= p) for v in y)
