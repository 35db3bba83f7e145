"""Scores for a sampled binary image ``z`` against the true gray-scale signal ``y``.

The relative log likelihood ``ln F(y, z) + S(y)`` subtracts the expected
log-fidelity, so its fidelity-weighted mean over all images is zero and
scores are comparable across signals of differing ambiguity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qcsense.encoding import as_signal, qubit_amplitudes
from qcsense.errors import InvalidArgumentError


@dataclass(frozen=True)
class Score:
    fidelity: float
    entropy: float
    rll: float


def _pixel_probs(y, p):
    """Per-pixel probabilities of reading 0 and 1."""
    cos, sin = qubit_amplitudes(y, p)
    return cos**2, sin**2


def fidelity(y, z, p: float = 0.5) -> float:
    y = as_signal(y)
    z = np.asarray(z, dtype=int)
    if z.shape != y.shape:
        raise InvalidArgumentError("image and signal lengths differ")
    p0, p1 = _pixel_probs(y, p)
    return float(np.prod(np.where(z == 1, p1, p0)))


def _xlogx(v):
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    pos = v > 0
    out[pos] = v[pos] * np.log(v[pos])
    return out


def signal_entropy(y, p: float = 0.5) -> float:
    p0, p1 = _pixel_probs(as_signal(y), p)
    return float(-(_xlogx(p0) + _xlogx(p1)).sum())


def rll(y, z, p: float = 0.5) -> float:
    """Relative log likelihood; ``-inf`` when ``z`` has zero fidelity."""
    f = fidelity(y, z, p)
    if f <= 0.0:
        return -math.inf
    return math.log(f) + signal_entropy(y, p)


def score(y, z, p: float = 0.5) -> Score:
    f = fidelity(y, z, p)
    s = signal_entropy(y, p)
    return Score(f, s, math.log(f) + s if f > 0 else -math.inf)


def rll_table(y, p: float = 0.5) -> np.ndarray:
    """RLL of every basis index ``z`` (qubit ``q`` is bit ``q``), vectorized."""
    p0, p1 = _pixel_probs(as_signal(y), p)
    n = p0.size
    bits = (np.arange(1 << n)[:, None] >> np.arange(n)) & 1
    probs = np.where(bits == 1, p1, p0)
    with np.errstate(divide="ignore"):
        logf = np.log(probs).sum(axis=1)
    return logf + signal_entropy(y, p)
