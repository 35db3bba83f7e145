"""Dense statevector simulation of small qubit registers.

Qubit ``q`` is bit ``q`` of the basis index, so ``z = sum_q bit_q(z) << q``.
Qubit 0 is the least-significant bit and is rendered first in bitstrings
(pixel 1, the "ground" pixel). All operations return fresh states; inputs
are never mutated.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from qcsense.errors import IncompatibleOutcomeError, InvalidArgumentError

NORM_TOL = 1e-10
ANNIHILATION_TOL = 1e-14

HADAMARD = "h"
ROT_Y = "ry"
ROT_Z = "rz"
PHASE = "phase"
GIVENS = "givens"
PAULI_X = "x"

_ONE_QUBIT_KINDS = (HADAMARD, ROT_Y, ROT_Z, PHASE, PAULI_X)
_KINDS = _ONE_QUBIT_KINDS + (GIVENS,)


@dataclass(frozen=True)
class QuantumState:
    """Normalized amplitude vector over ``num_qubits`` qubits."""

    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if self.num_qubits < 1:
            raise InvalidArgumentError("num_qubits must be positive")
        if amps.shape != (1 << self.num_qubits,):
            raise InvalidArgumentError(
                f"expected {1 << self.num_qubits} amplitudes, got shape {amps.shape}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidArgumentError(f"state is not normalized (norm^2 = {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_unnormalized(cls, amplitudes) -> "QuantumState":
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.sqrt(float(np.vdot(amps, amps).real))
        if norm < ANNIHILATION_TOL:
            raise IncompatibleOutcomeError("cannot normalize a (near) zero vector")
        n = int(round(np.log2(amps.size)))
        return cls(n, amps / norm)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits


@dataclass(frozen=True)
class Gate:
    """A (possibly controlled) gate.

    ``controls`` is a sequence of ``(qubit, polarity)`` pairs; the gate acts
    only on components where every control qubit equals its polarity.
    """

    kind: str
    targets: tuple
    theta: float = 0.0
    controls: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(
            self, "controls", tuple((int(q), int(b)) for q, b in self.controls)
        )
        if self.kind not in _KINDS:
            raise InvalidArgumentError(f"unknown gate kind {self.kind!r}")
        want = 2 if self.kind == GIVENS else 1
        if len(self.targets) != want:
            raise InvalidArgumentError(f"{self.kind} gate needs {want} target(s)")
        if not np.isfinite(self.theta):
            raise InvalidArgumentError("gate angle must be finite")
        if any(b not in (0, 1) for _, b in self.controls):
            raise InvalidArgumentError("control polarity must be 0 or 1")
        qubits = self.qubits
        if len(set(qubits)) != len(qubits):
            raise InvalidArgumentError(f"duplicate qubit indices in {qubits}")
        if min(qubits) < 0:
            raise InvalidArgumentError("qubit indices must be non-negative")

    @property
    def qubits(self) -> tuple:
        return self.targets + tuple(q for q, _ in self.controls)

    def matrix(self) -> np.ndarray:
        """Target-space matrix. For two-target gates the basis is ordered
        ``|t0 t1> = |00>, |01>, |10>, |11>`` with ``t0`` the first target."""
        t = self.theta
        if self.kind == HADAMARD:
            return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        if self.kind == PAULI_X:
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if self.kind == ROT_Y:
            c, s = np.cos(t / 2), np.sin(t / 2)
            return np.array([[c, -s], [s, c]], dtype=complex)
        if self.kind == ROT_Z:
            return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])
        if self.kind == PHASE:
            return np.diag([1.0, np.exp(1j * t)]).astype(complex)
        c, s = np.cos(t), np.sin(t)
        # |01> -> c|01> + s|10>,  |10> -> -s|01> + c|10>
        return np.array(
            [[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1]], dtype=complex
        )

    def inverse(self) -> "Gate":
        if self.kind in (HADAMARD, PAULI_X):
            return self
        return Gate(self.kind, self.targets, -self.theta, self.controls)


def hadamard(q, controls=()):
    return Gate(HADAMARD, (q,), 0.0, controls)


def rot_y(q, theta, controls=()):
    return Gate(ROT_Y, (q,), theta, controls)


def rot_z(q, theta, controls=()):
    return Gate(ROT_Z, (q,), theta, controls)


def phase(q, theta, controls=()):
    return Gate(PHASE, (q,), theta, controls)


def pauli_x(q, controls=()):
    return Gate(PAULI_X, (q,), 0.0, controls)


def givens(q0, q1, theta, controls=()):
    return Gate(GIVENS, (q0, q1), theta, controls)


@dataclass(frozen=True)
class DiagonalOperator:
    """Diagonal operator with eigenvalue ``sum_q c_q bit_q(z) - offset`` on ``|z>``."""

    coefficients: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float).copy()
        if c.ndim != 1:
            raise InvalidArgumentError("coefficients must be a vector")
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def num_qubits(self) -> int:
        return self.coefficients.size

    def spectrum(self) -> np.ndarray:
        """Eigenvalues for every basis index, as a length-``2^n`` vector."""
        return basis_bits(self.num_qubits) @ self.coefficients - self.offset


def basis_bits(n: int) -> np.ndarray:
    """``(2^n, n)`` array whose row ``z`` holds ``bit_q(z)`` in column ``q``."""
    z = np.arange(1 << n)
    return ((z[:, None] >> np.arange(n)) & 1).astype(float)


def bits_of(z: int, n: int) -> tuple:
    return tuple((z >> q) & 1 for q in range(n))


def index_of(bits: Sequence[int]) -> int:
    return sum(int(b) << q for q, b in enumerate(bits))


def format_bits(bits: Sequence[int]) -> str:
    """Render a bitstring qubit-0 first (pixel 1 leftmost)."""
    return "".join(str(int(b)) for b in bits)


def _check_qubits(n: int, qubits: Sequence[int]):
    qubits = tuple(int(q) for q in qubits)
    if len(set(qubits)) != len(qubits):
        raise InvalidArgumentError(f"duplicate qubit indices in {qubits}")
    for q in qubits:
        if not 0 <= q < n:
            raise InvalidArgumentError(f"qubit {q} out of range for {n} qubits")
    return qubits


def _axis(n: int, q: int) -> int:
    # C-order reshape puts the most significant bit on axis 0.
    return n - 1 - q


def new_basis_state(n: int, z: int = 0) -> QuantumState:
    if n < 1:
        raise InvalidArgumentError("need at least one qubit")
    if not 0 <= z < (1 << n):
        raise InvalidArgumentError(f"basis index {z} out of range for {n} qubits")
    amps = np.zeros(1 << n, dtype=complex)
    amps[z] = 1.0
    return QuantumState(n, amps)


def product_state(qubit_states: Sequence[Sequence[complex]]) -> QuantumState:
    """Tensor product of single-qubit states; entry ``q`` is qubit ``q``."""
    amps = np.ones(1, dtype=complex)
    for psi in qubit_states:
        # Qubit q is bit q, so later (higher) qubits vary slowest.
        amps = np.kron(np.asarray(psi, dtype=complex), amps)
    return QuantumState.from_unnormalized(amps)


def apply_gate(state: QuantumState, gate: Gate) -> QuantumState:
    n = state.num_qubits
    _check_qubits(n, gate.qubits)
    psi = state.amplitudes.reshape((2,) * n).copy()

    index = [slice(None)] * n
    for q, b in gate.controls:
        index[_axis(n, q)] = b
    index = tuple(index)
    sub = psi[index]

    # Axis positions of the targets inside the control-sliced view.
    removed = sorted(_axis(n, q) for q, _ in gate.controls)
    tax = []
    for t in gate.targets:
        a = _axis(n, t)
        tax.append(a - sum(1 for r in removed if r < a))

    k = len(gate.targets)
    mat = gate.matrix().reshape((2,) * (2 * k))
    out = np.tensordot(mat, sub, axes=(list(range(k, 2 * k)), tax))
    out = np.moveaxis(out, list(range(k)), tax)
    psi[index] = out
    return QuantumState(n, psi.reshape(-1))


def apply_gates(state: QuantumState, gates) -> QuantumState:
    for g in gates:
        state = apply_gate(state, g)
    return state


def full_distribution(state: QuantumState) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def marginal_distribution(state: QuantumState, qubits: Sequence[int]) -> np.ndarray:
    """Joint distribution of ``qubits``, indexed by ``index_of(bits)``."""
    n = state.num_qubits
    qubits = _check_qubits(n, qubits)
    p = full_distribution(state).reshape((2,) * n)
    others = tuple(_axis(n, q) for q in range(n) if q not in qubits)
    p = p.sum(axis=others) if others else p
    # Remaining axes are ordered by descending qubit index; reorder so the
    # first requested qubit becomes the least-significant bit.
    kept = sorted(qubits, reverse=True)
    order = [kept.index(q) for q in reversed(qubits)]
    return np.transpose(p, order).reshape(-1)


def _project(state: QuantumState, qubits, bits) -> np.ndarray:
    n = state.num_qubits
    psi = state.amplitudes.reshape((2,) * n)
    out = np.zeros_like(psi)
    index = [slice(None)] * n
    for q, b in zip(qubits, bits):
        index[_axis(n, q)] = int(b)
    index = tuple(index)
    out[index] = psi[index]
    return out.reshape(-1)


def postselect_subset(state: QuantumState, qubits, bits):
    """Project onto ``qubits == bits``; returns ``(probability, collapsed)``."""
    qubits = _check_qubits(state.num_qubits, qubits)
    bits = tuple(int(b) for b in bits)
    if len(bits) != len(qubits):
        raise InvalidArgumentError("qubits and bits differ in length")
    if any(b not in (0, 1) for b in bits):
        raise InvalidArgumentError("bits must be 0 or 1")
    projected = _project(state, qubits, bits)
    prob = float(np.vdot(projected, projected).real)
    if prob < ANNIHILATION_TOL:
        raise IncompatibleOutcomeError(
            f"outcome {format_bits(bits)} on qubits {qubits} has probability {prob:.3g}"
        )
    return prob, QuantumState(state.num_qubits, projected / np.sqrt(prob))


def measure_subset(state: QuantumState, qubits, rng: np.random.Generator):
    """Born-rule measurement of ``qubits``; returns ``(bits, collapsed)``."""
    qubits = _check_qubits(state.num_qubits, qubits)
    if not qubits:
        return (), state
    probs = marginal_distribution(state, qubits)
    k = int(rng.choice(probs.size, p=probs / probs.sum()))
    bits = bits_of(k, len(qubits))
    _, collapsed = postselect_subset(state, qubits, bits)
    return bits, collapsed


def drop_qubits(state: QuantumState, qubits, bits) -> QuantumState:
    """Remove qubits already collapsed onto ``bits``; the rest keep their order."""
    n = state.num_qubits
    qubits = _check_qubits(n, qubits)
    if len(qubits) >= n:
        raise InvalidArgumentError("cannot drop every qubit")
    psi = state.amplitudes.reshape((2,) * n)
    index = [slice(None)] * n
    for q, b in zip(qubits, bits):
        index[_axis(n, q)] = int(b)
    rest = psi[tuple(index)].reshape(-1)
    weight = float(np.vdot(rest, rest).real)
    if abs(weight - 1.0) > NORM_TOL:
        raise InvalidArgumentError("dropped qubits are not in the stated basis state")
    return QuantumState(n - len(qubits), rest)


def append_qubits(state: QuantumState, count: int = 1) -> QuantumState:
    """Append ``count`` fresh |0> qubits as the highest-index qubits."""
    amps = np.zeros(state.dim << count, dtype=complex)
    amps[: state.dim] = state.amplitudes
    return QuantumState(state.num_qubits + count, amps)


def diagonal_eigenvalue(op: DiagonalOperator, z: int) -> float:
    n = op.num_qubits
    if not 0 <= z < (1 << n):
        raise InvalidArgumentError(f"basis index {z} out of range for {n} qubits")
    return float(sum(c for q, c in enumerate(op.coefficients) if (z >> q) & 1)) - op.offset


def apply_diagonal_weights(
    state: QuantumState, weight: Callable[[int], float] | np.ndarray
) -> QuantumState:
    """Multiply amplitude ``z`` by ``weight(z)`` and renormalize.

    Not a unitary: this is a classical-simulation shortcut for non-unitary
    diagonal filters and has no direct circuit realization.
    ``weight`` may also be a precomputed length-``2^n`` array.
    """
    if callable(weight):
        w = np.array([weight(z) for z in range(state.dim)], dtype=float)
    else:
        w = np.asarray(weight, dtype=float)
    if w.shape != (state.dim,):
        raise InvalidArgumentError("weight vector has the wrong length")
    if np.any(w < 0):
        raise InvalidArgumentError("weights must be non-negative")
    amps = state.amplitudes * w
    norm2 = float(np.vdot(amps, amps).real)
    if norm2 < ANNIHILATION_TOL:
        raise IncompatibleOutcomeError("diagonal weights annihilate the state")
    return QuantumState(state.num_qubits, amps / np.sqrt(norm2))
