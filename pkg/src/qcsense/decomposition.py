"""Factor a sensing matrix as ``A = U diag(s) L^T [I_m 0] R``.

``R`` is an ``n x n`` rotation built from adjacent-column Givens rotations,
so it lifts to a number-conserving circuit on ``n`` qubits. Measuring the
first ``m`` qubits after that circuit reads off ``[I_m 0] R y``, which is
computable classically as ``L diag(1/s) U^T x`` (the syndrome).

The reduction of ``V^T`` (from the SVD) proceeds in two sweeps:

1. Row rotations (absorbed into ``L``) bring ``V^T`` into a staircase in
   which row ``t`` vanishes right of a pivot column ``p_t``, choosing each
   pivot as far right as possible. For a matrix supported on only ``m``
   columns this lands on a signed column selection.
2. Column rotations on adjacent pairs push row ``r``'s weight from ``p_r``
   down to column ``r``, at most ``m (n - m)`` of them in total.

A final sign pass (phase flips on measured qubits) makes the dominant entry
of each measured row of ``R`` positive, so binary syndromes read as bits.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from qcsense.errors import InvalidArgumentError, RankDeficientError
from qcsense.sensing import SensingMatrix
from qcsense.statevector import givens, phase

DEFAULT_RANK_TOL = 1e-10
_PIVOT_TOL = 1e-10
_ZERO_TOL = 1e-14


@dataclass(frozen=True)
class DecompositionFactors:
    U: np.ndarray = field(repr=False)
    singular_values: np.ndarray
    L: np.ndarray = field(repr=False)
    givens_gates: tuple  # (q, q + 1, angle) in application order
    sign_flips: tuple  # measured qubits that receive a Z after the rotations
    n: int
    checksum: str

    @property
    def m(self) -> int:
        return self.singular_values.size

    def rotation_matrix(self) -> np.ndarray:
        """The ``n x n`` matrix ``R`` realized by the gate list."""
        R = np.eye(self.n)
        for a, b, theta in self.givens_gates:
            c, s = math.cos(theta), math.sin(theta)
            ra, rb = R[a].copy(), R[b].copy()
            R[a] = c * ra + s * rb
            R[b] = -s * ra + c * rb
        for q in self.sign_flips:
            R[q] = -R[q]
        return R

    def circuit(self):
        gates = [givens(a, b, theta) for a, b, theta in self.givens_gates]
        gates += [phase(q, math.pi) for q in self.sign_flips]
        return gates

    def inverse_circuit(self):
        return [g.inverse() for g in reversed(self.circuit())]

    def reconstruct(self) -> np.ndarray:
        proj = np.eye(self.m, self.n)
        return self.U @ np.diag(self.singular_values) @ self.L.T @ proj @ self.rotation_matrix()

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "m": self.m,
                "checksum": self.checksum,
                "U": self.U.tolist(),
                "singular_values": self.singular_values.tolist(),
                "L": self.L.tolist(),
                "givens_gates": [[a, b, float(t)] for a, b, t in self.givens_gates],
                "sign_flips": list(self.sign_flips),
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "DecompositionFactors":
        d = json.loads(text)
        m = d["m"]
        return cls(
            U=np.array(d["U"], dtype=float).reshape(m, m),
            singular_values=np.array(d["singular_values"], dtype=float),
            L=np.array(d["L"], dtype=float).reshape(m, m),
            givens_gates=tuple((int(a), int(b), float(t)) for a, b, t in d["givens_gates"]),
            sign_flips=tuple(int(q) for q in d["sign_flips"]),
            n=int(d["n"]),
            checksum=d["checksum"],
        )


@dataclass(frozen=True)
class Syndrome:
    real_values: np.ndarray
    discretized_bits: tuple
    max_rounding_residual: float


def matrix_checksum(a: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(a, dtype=float).tobytes()).hexdigest()[:16]


def _staircase(Q: np.ndarray):
    """Row-rotate ``Q`` in place; returns ``(W, pivots)`` with ``W Q_in = Q_out``."""
    m, n = Q.shape
    W = np.eye(m)
    pivots = [0] * m
    limit = n
    for t in range(m - 1, -1, -1):
        block = np.abs(Q[: t + 1, :limit])
        cols = np.nonzero(block.max(axis=0) > _PIVOT_TOL)[0]
        if cols.size == 0:
            raise RankDeficientError("rows of V^T are not independent")
        c = int(cols[-1])
        for l in range(t):
            a, b = Q[l, c], Q[l + 1, c]
            if abs(a) <= _ZERO_TOL:
                continue
            theta = math.atan2(a, b)
            cs, sn = math.cos(theta), math.sin(theta)
            for M in (Q, W):
                ra, rb = M[l].copy(), M[l + 1].copy()
                M[l] = cs * ra - sn * rb
                M[l + 1] = sn * ra + cs * rb
            Q[l, c] = 0.0
        pivots[t] = c
        limit = c
    return W, pivots


def _push_left(Q: np.ndarray, pivots):
    """Column-rotate ``Q`` in place toward ``[D 0]``; returns the gate list."""
    m, _ = Q.shape
    gates = []
    for r in range(m):
        for c in range(pivots[r], r, -1):
            a, b = Q[r, c - 1], Q[r, c]
            if abs(b) <= _ZERO_TOL:
                continue
            theta = math.atan2(b, a)
            cs, sn = math.cos(theta), math.sin(theta)
            ca, cb = Q[:, c - 1].copy(), Q[:, c].copy()
            Q[:, c - 1] = cs * ca + sn * cb
            Q[:, c] = -sn * ca + cs * cb
            Q[r, c] = 0.0
            gates.append((c - 1, c, theta))
    return gates


def decompose_sensing_matrix(A, rank_tol: float = DEFAULT_RANK_TOL) -> DecompositionFactors:
    entries = A.entries if isinstance(A, SensingMatrix) else np.asarray(A, dtype=float)
    m, n = entries.shape
    if m > n:
        raise InvalidArgumentError("decomposition needs m <= n")
    checksum = matrix_checksum(entries)
    if m == 0:
        empty = np.zeros((0, 0))
        return DecompositionFactors(empty, np.zeros(0), empty, (), (), n, checksum)

    U, svals, Vt = np.linalg.svd(entries, full_matrices=False)
    if svals.min() <= rank_tol:
        raise RankDeficientError(
            f"smallest singular value {svals.min():.3g} <= rank tolerance {rank_tol:g}"
        )
    Q = Vt.copy()
    W, pivots = _staircase(Q)
    gates = _push_left(Q, pivots)
    D = np.diag(np.where(np.diag(Q[:, :m]) < 0, -1.0, 1.0))

    measured_rows = D @ W @ Vt  # first m rows of R before the sign pass
    dominant = measured_rows[np.arange(m), np.abs(measured_rows).argmax(axis=1)]
    S = np.where(dominant < 0, -1.0, 1.0)
    L = np.diag(S) @ D @ W
    flips = tuple(int(q) for q in np.nonzero(S < 0)[0])
    return DecompositionFactors(U, svals, L, tuple(gates), flips, n, checksum)


def _round_half_up(v):
    return np.floor(np.asarray(v) + 0.5)


def compute_syndrome(factors: DecompositionFactors, x) -> Syndrome:
    x = np.asarray(x, dtype=float)
    if x.shape != (factors.m,):
        raise InvalidArgumentError(f"measurement vector must have length {factors.m}")
    real = factors.L @ ((factors.U.T @ x) / factors.singular_values)
    rounded = _round_half_up(real)
    bits = tuple(int(b) for b in np.clip(rounded, 0, 1))
    resid = float(np.max(np.abs(real - rounded))) if real.size else 0.0
    return Syndrome(real, bits, resid)
