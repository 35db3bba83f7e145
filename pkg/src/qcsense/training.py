"""Born machine preparation as a superposition ("quantum average") of a training set.

Two routes produce the same state: :func:`quantum_average_direct` sums the
encoded signals and renormalizes, while :func:`quantum_average_circuit`
simulates the control-register circuit (Hadamards, multi-controlled state
preparation, Hadamards, post-selection on control = 0) gate by gate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qcsense.encoding import as_signal, check_midpoint, encode_signal, qubit_angles
from qcsense.errors import InvalidArgumentError, NumericOverflowError, TrainingFailure
from qcsense.statevector import (
    QuantumState,
    apply_gate,
    drop_qubits,
    full_distribution,
    hadamard,
    measure_subset,
    new_basis_state,
    postselect_subset,
    rot_y,
)

DEFAULT_ENTROPY_STEP = 0.01


@dataclass(frozen=True)
class TrainingSet:
    signals: tuple
    midpoint: float = 0.5

    def __post_init__(self):
        sigs = tuple(as_signal(s) for s in self.signals)
        if not sigs:
            raise InvalidArgumentError("training set is empty")
        if len({s.size for s in sigs}) != 1:
            raise InvalidArgumentError("all signals must share one dimension")
        for s in sigs:
            s.flags.writeable = False
        object.__setattr__(self, "signals", sigs)
        object.__setattr__(self, "midpoint", check_midpoint(self.midpoint))

    @property
    def num_pixels(self) -> int:
        return self.signals[0].size

    def __len__(self):
        return len(self.signals)

    def control_qubits(self) -> int:
        """Control-register width; a single signal still gets one qubit."""
        return max(1, math.ceil(math.log2(len(self.signals))))

    def padded(self) -> "TrainingSet":
        """Cycle the signals until every control pattern has one to prepare."""
        size = 1 << self.control_qubits()
        sigs = tuple(self.signals[i % len(self.signals)] for i in range(size))
        return TrainingSet(sigs, self.midpoint)


@dataclass(frozen=True)
class TrainedMachine:
    state: QuantumState
    midpoint: float
    training_size: int
    provenance: str  # "direct" or "circuit"
    padded_size: int = 0


def quantum_average_direct(T: TrainingSet) -> TrainedMachine:
    total = sum(encode_signal(y, T.midpoint).amplitudes for y in T.signals)
    state = QuantumState.from_unnormalized(total)
    return TrainedMachine(state, T.midpoint, len(T), "direct", len(T))


def preparation_gates(y, p, controls=()):
    """RotY gates preparing ``encode_signal(y, p)`` from |0...0>."""
    return [rot_y(q, 2.0 * a, controls) for q, a in enumerate(qubit_angles(y, p))]


def averaging_circuit_state(T: TrainingSet) -> QuantumState:
    """Full register (signal qubits, then control qubits) before measurement."""
    P = T.padded()
    n, k = P.num_pixels, P.control_qubits()
    ctrl = list(range(n, n + k))
    state = new_basis_state(n + k, 0)
    for c in ctrl:
        state = apply_gate(state, hadamard(c))
    for z, y in enumerate(P.signals):
        pattern = tuple((c, (z >> j) & 1) for j, c in enumerate(ctrl))
        for g in preparation_gates(y, P.midpoint, pattern):
            state = apply_gate(state, g)
    for c in ctrl:
        state = apply_gate(state, hadamard(c))
    return state


def circuit_success_probability(T: TrainingSet) -> float:
    """Probability that the control register reads all zeros, by simulation."""
    full = averaging_circuit_state(T)
    n, k = T.num_pixels, T.control_qubits()
    prob, _ = postselect_subset(full, range(n, n + k), (0,) * k)
    return prob


def quantum_average_circuit(T: TrainingSet, rng: np.random.Generator, max_attempts=None):
    """Repeat the averaging circuit until the control register reads zero.

    Returns ``(success, machine, attempts)``; raises :class:`TrainingFailure`
    once ``max_attempts`` (default ``64 * padded size``) is exhausted.
    """
    P = T.padded()
    n, k = P.num_pixels, P.control_qubits()
    ctrl = tuple(range(n, n + k))
    if max_attempts is None:
        max_attempts = 64 * len(P)
    full = averaging_circuit_state(T)
    for attempt in range(1, max_attempts + 1):
        bits, collapsed = measure_subset(full, ctrl, rng)
        if not any(bits):
            state = drop_qubits(collapsed, ctrl, bits)
            machine = TrainedMachine(state, T.midpoint, len(T), "circuit", len(P))
            return True, machine, attempt
    raise TrainingFailure(
        f"control register never read zero in {max_attempts} attempts",
        success_rate=0.0,
    )


def success_probability(T: TrainingSet) -> float:
    """Closed-form chance of reading control = 0, using the padded set."""
    P = T.padded()
    vecs = np.array([encode_signal(y, P.midpoint).amplitudes for y in P.signals])
    gram = (vecs.conj() @ vecs.T).real
    size = len(P)
    off = (gram.sum() - np.trace(gram)) / 2.0
    return 1.0 / size + 2.0 / size**2 * off


def nll(T: TrainingSet, machine: TrainedMachine) -> float:
    if machine.state.num_qubits != T.num_pixels:
        raise InvalidArgumentError("machine and training set dimensions differ")
    total = 0.0
    for y in T.signals:
        overlap = abs(np.vdot(encode_signal(y, T.midpoint).amplitudes, machine.state.amplitudes)) ** 2
        if overlap < 1e-300:
            raise NumericOverflowError("overlap underflows; NLL is unbounded")
        total += math.log(overlap)
    return -total / len(T)


def distribution_entropy(machine) -> float:
    """Shannon entropy (nats) of the machine's basis-state distribution."""
    state = machine.state if isinstance(machine, TrainedMachine) else machine
    p = full_distribution(state)
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def entropy_curve(signals, step=DEFAULT_ENTROPY_STEP):
    grid = np.arange(1, math.ceil(1.0 / step) + 1) * step
    grid = np.round(grid[grid < 1.0 - 1e-12], 12)
    curve = []
    for p in grid:
        machine = quantum_average_direct(TrainingSet(tuple(signals), float(p)))
        curve.append((float(p), distribution_entropy(machine)))
    return curve


def optimize_midpoint(signals, step=DEFAULT_ENTROPY_STEP):
    """Grid search for the midpoint maximizing distribution entropy.

    Returns ``(p_star, curve)`` where ``curve`` lists ``(p, entropy)``. Ties
    resolve to the smallest ``p``.
    """
    if not 0 < step < 0.5:
        raise InvalidArgumentError("grid step must lie in (0, 0.5)")
    if len(signals) == 0:
        raise InvalidArgumentError("no signals given")
    curve = entropy_curve(signals, step)
    best = max(curve, key=lambda pe: (round(pe[1], 12), -pe[0]))
    return best[0], curve
