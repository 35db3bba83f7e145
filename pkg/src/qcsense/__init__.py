"""Compressive sensing with a Born machine on a dense statevector simulator."""
from qcsense.decomposition import DecompositionFactors, Syndrome, compute_syndrome, decompose_sensing_matrix
from qcsense.encoding import best_binary_image, encode_signal, remap_midpoint
from qcsense.errors import (
    IncompatibleOutcomeError,
    InvalidArgumentError,
    NumericOverflowError,
    RankDeficientError,
    TrainingFailure,
)
from qcsense.experiment import ExperimentConfig, TrialRecord, run_experiment, run_trial
from qcsense.metrics import fidelity, rll, score, signal_entropy
from qcsense.projection import (
    gaussian_project,
    pixel_postselect,
    project_decomposition,
    project_rodeo,
    repeat_until_success,
    rodeo_step,
)
from qcsense.sensing import SensingMatrix, apply_sensing, generate_matrix
from qcsense.statevector import DiagonalOperator, Gate, QuantumState, apply_gate, apply_gates
from qcsense.training import (
    TrainingSet,
    nll,
    optimize_midpoint,
    quantum_average_circuit,
    quantum_average_direct,
    success_probability,
)

__version__ = "0.1.0"

__all__ = [
    "DecompositionFactors", "DiagonalOperator", "ExperimentConfig", "Gate",
    "IncompatibleOutcomeError", "InvalidArgumentError", "NumericOverflowError",
    "QuantumState", "RankDeficientError", "SensingMatrix", "Syndrome",
    "TrainingFailure", "TrainingSet", "TrialRecord", "apply_gate", "apply_gates",
    "apply_sensing", "best_binary_image", "compute_syndrome", "decompose_sensing_matrix",
    "encode_signal", "fidelity", "gaussian_project", "generate_matrix", "nll",
    "optimize_midpoint", "pixel_postselect", "project_decomposition", "project_rodeo",
    "quantum_average_circuit", "quantum_average_direct", "remap_midpoint",
    "repeat_until_success", "rll", "rodeo_step", "run_experiment", "run_trial",
    "score", "signal_entropy", "success_probability",
]
