"""Projection of a Born machine onto measurement-consistent basis states.

Four routes, all single-attempt unless wrapped by :func:`repeat_until_success`:

* :func:`pixel_postselect` measures the sensed pixels directly (single-pixel
  sensing matrices only).
* :func:`project_decomposition` rotates with the Givens circuit from
  :mod:`qcsense.decomposition`, checks the measured syndrome, rotates back.
* :func:`project_rodeo` runs one phase-kickback round per row with one
  auxiliary control qubit and a random evolution time per round.
* :func:`gaussian_project` applies the diagonal Gaussian filter directly.
  This one is a classical shortcut: the filter is not unitary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from qcsense.decomposition import DecompositionFactors, compute_syndrome
from qcsense.errors import IncompatibleOutcomeError, InvalidArgumentError
from qcsense.sensing import SensingMatrix
from qcsense.statevector import (
    DiagonalOperator,
    QuantumState,
    append_qubits,
    apply_diagonal_weights,
    apply_gate,
    apply_gates,
    drop_qubits,
    hadamard,
    measure_subset,
    phase,
)

DEFAULT_GAUSSIAN_SIGMA = 0.5
DEFAULT_RODEO_SIGMA = math.pi
BINARY_TOL = 1e-9


@dataclass(frozen=True)
class ProjectionOutcome:
    succeeded: bool
    attempts_used: int = 1
    state: QuantumState | None = None
    failure_reason: str = ""


def default_attempt_cap(m: int) -> int:
    return 4 * 2**m


def _entries(A):
    return A.entries if isinstance(A, SensingMatrix) else np.asarray(A, dtype=float)


def _check_x(A, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (A.shape[0],):
        raise InvalidArgumentError(f"x has shape {x.shape}, expected ({A.shape[0]},)")
    return x


def single_pixel_targets(A, x):
    """Map each sensed pixel to its required bit; ``None`` if rows conflict."""
    A = _entries(A)
    x = _check_x(A, x)
    ones = A == 1.0
    if not np.all((A == 0.0) | ones) or not np.all(ones.sum(axis=1) == 1):
        raise InvalidArgumentError("pixel post-selection needs a single-pixel matrix")
    if np.any(np.abs(x - np.round(x)) > BINARY_TOL) or np.any((x < -BINARY_TOL) | (x > 1 + BINARY_TOL)):
        raise InvalidArgumentError("single-pixel measurements must be 0 or 1")
    want = {}
    for row, value in zip(A, np.round(x).astype(int)):
        q = int(np.argmax(row))
        if want.setdefault(q, int(value)) != int(value):
            return None
    return want


def pixel_postselect(machine: QuantumState, A, x, rng) -> ProjectionOutcome:
    want = single_pixel_targets(A, x)
    if want is None:
        return ProjectionOutcome(False, 1, None, "contradictory single-pixel rows")
    if not want:
        return ProjectionOutcome(True, 1, machine)
    qubits = tuple(sorted(want))
    bits, collapsed = measure_subset(machine, qubits, rng)
    if bits != tuple(want[q] for q in qubits):
        return ProjectionOutcome(False, 1, None, "measured pixels disagree with x")
    return ProjectionOutcome(True, 1, collapsed)


def project_decomposition(
    machine: QuantumState, factors: DecompositionFactors, x, rng
) -> ProjectionOutcome:
    if machine.num_qubits != factors.n:
        raise InvalidArgumentError("machine and factors differ in qubit count")
    syndrome = compute_syndrome(factors, x)
    if factors.m == 0:
        return ProjectionOutcome(True, 1, machine)
    rotated = apply_gates(machine, factors.circuit())
    bits, collapsed = measure_subset(rotated, range(factors.m), rng)
    if bits != syndrome.discretized_bits:
        return ProjectionOutcome(False, 1, None, "syndrome mismatch")
    return ProjectionOutcome(True, 1, apply_gates(collapsed, factors.inverse_circuit()))


def rodeo_gates(row: DiagonalOperator, tau: float, control: int):
    """Gates between the two Hadamards: controlled ``exp[-i (N - x) tau]``."""
    gates = [
        phase(q, -c * tau, controls=((control, 1),))
        for q, c in enumerate(row.coefficients)
        if c != 0.0
    ]
    gates.append(phase(control, row.offset * tau))
    return gates


def rodeo_circuit_state(machine: QuantumState, row: DiagonalOperator, tau: float) -> QuantumState:
    """Register after H, controlled evolution, H; the control is qubit ``n``."""
    n = machine.num_qubits
    if row.num_qubits != n:
        raise InvalidArgumentError("row operator and machine differ in qubit count")
    state = apply_gate(append_qubits(machine, 1), hadamard(n))
    state = apply_gates(state, rodeo_gates(row, tau, n))
    return apply_gate(state, hadamard(n))


def rodeo_step(machine: QuantumState, row: DiagonalOperator, sigma: float, rng, tau=None):
    """One phase-kickback round with a single auxiliary control qubit.

    Returns ``(control_bit, updated_state, tau)``. ``tau`` is drawn from
    ``Normal(0, sigma^2)`` unless given explicitly.
    """
    if sigma <= 0:
        raise InvalidArgumentError("sigma must be positive")
    if tau is None:
        tau = float(rng.normal(0.0, sigma))
    ctrl = machine.num_qubits
    state = rodeo_circuit_state(machine, row, tau)
    (bit,), collapsed = measure_subset(state, (ctrl,), rng)
    return bit, drop_qubits(collapsed, (ctrl,), (bit,)), tau


def project_rodeo(machine: QuantumState, A, x, sigma: float, rng) -> ProjectionOutcome:
    A = _entries(A)
    x = _check_x(A, x)
    if sigma <= 0:
        raise InvalidArgumentError("sigma must be positive")
    state = machine
    for i in range(A.shape[0]):
        bit, state, _ = rodeo_step(state, DiagonalOperator(A[i], x[i]), sigma, rng)
        if bit:
            return ProjectionOutcome(False, 1, None, f"control qubit read 1 on row {i}")
    return ProjectionOutcome(True, 1, state)


def gaussian_weight(deviation: np.ndarray, sigma: float) -> np.ndarray:
    return np.exp(-(deviation**2) / (2.0 * sigma**2))


def gaussian_project(
    machine: QuantumState,
    A,
    x,
    sigma: float = DEFAULT_GAUSSIAN_SIGMA,
    profile: Callable[[np.ndarray], np.ndarray] | None = None,
) -> ProjectionOutcome:
    """Deterministic soft projection, one diagonal filter per row.

    ``profile`` maps the eigenvalue deviation ``nu_z - x_i`` to a weight;
    the default is the Gaussian with width ``sigma``.
    """
    A = _entries(A)
    x = _check_x(A, x)
    if sigma <= 0:
        raise InvalidArgumentError("sigma must be positive")
    state = machine
    for i in range(A.shape[0]):
        deviation = DiagonalOperator(A[i], x[i]).spectrum()
        w = gaussian_weight(deviation, sigma) if profile is None else profile(deviation)
        state = apply_diagonal_weights(state, w)
    return ProjectionOutcome(True, 1, state)


def repeat_until_success(attempt: Callable[[], ProjectionOutcome], cap: int) -> ProjectionOutcome:
    """Call ``attempt`` until it succeeds or ``cap`` attempts are spent."""
    last = None
    for k in range(1, cap + 1):
        try:
            last = attempt()
        except IncompatibleOutcomeError as exc:
            return ProjectionOutcome(False, k, None, str(exc))
        if last.succeeded:
            return ProjectionOutcome(True, k, last.state)
    reason = last.failure_reason if last is not None else "no attempts allowed"
    return ProjectionOutcome(False, cap, None, f"attempt cap {cap} reached: {reason}")
