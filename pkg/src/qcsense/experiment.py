"""Monte-Carlo harness over a seeded pool of signal and matrix pairs.

Every random draw comes from a stream derived from the master seed and the
draw's coordinates, so results do not depend on execution order:

* pool signal ``y`` of pair ``k``:        ``(POOL, k)``
* sensing matrix of pair ``k`` at ``m``:  ``(MATRIX, k, m)``
* training sets:                          ``(TRAINING,)``
* trial ``t`` of pair ``k`` at ``m``:     ``(TRIAL, k, m, t, protocol index)``

Trials normally run through a :class:`TrialKernel`, which precomputes the
parts of a protocol that do not depend on the trial's randomness (the
machine, the rotated state and syndrome, the deviation spectrum, ...).
Each attempt inside a kernel has the same outcome law as one call of the
corresponding function in :mod:`qcsense.projection`; ``literal=True`` in
:func:`run_trial` runs those functions attempt by attempt instead.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from qcsense.decomposition import compute_syndrome, decompose_sensing_matrix
from qcsense.errors import IncompatibleOutcomeError, InvalidArgumentError, RankDeficientError
from qcsense.forest import ForestModel, build_training_sets, ideal_training_set, sample_signal
from qcsense.metrics import rll_table
from qcsense.projection import (
    DEFAULT_GAUSSIAN_SIGMA,
    DEFAULT_RODEO_SIGMA,
    default_attempt_cap,
    gaussian_project,
    pixel_postselect,
    project_decomposition,
    project_rodeo,
    repeat_until_success,
    single_pixel_targets,
)
from qcsense.sensing import (
    COLUMN_SUPPORTED_UNIFORM,
    MATRIX_CLASSES,
    SINGLE_PIXEL,
    SensingMatrix,
    apply_sensing,
    generate_matrix,
)
from qcsense.statevector import (
    DiagonalOperator,
    QuantumState,
    apply_gates,
    bits_of,
    format_bits,
    full_distribution,
    marginal_distribution,
    measure_subset,
    postselect_subset,
)
from qcsense.training import (
    DEFAULT_ENTROPY_STEP,
    TrainingSet,
    entropy_curve,
    optimize_midpoint,
    quantum_average_direct,
)

PIXEL = "pixel"
DECOMPOSITION = "decomposition"
RODEO = "rodeo"
QITE = "qite"
PROTOCOLS = (PIXEL, DECOMPOSITION, RODEO, QITE)

POOL, MATRIX, TRAINING, TRIAL = range(4)
_RODEO_CHUNK = 32


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    protocols: tuple = (QITE,)
    matrix_class: str = "binary_dense"
    m_values: tuple = (0, 1, 2, 3, 4, 5, 6)
    sigma: float | None = None
    midpoint: str = "fixed:0.5"
    trials_per_pair: int = 1024
    num_pairs: int = 32
    training_set_size: int = 16
    training_set_count: int = 3
    machine: str = "ideal"
    master_seed: int = 0
    attempt_cap: int | None = None
    noise_std: float = 0.1
    young_prototype: tuple = ForestModel.young_prototype
    mature_prototype: tuple = ForestModel.mature_prototype
    distinct_pixels: bool = True
    full_rank: bool = True

    def __post_init__(self):
        protocols = (self.protocols,) if isinstance(self.protocols, str) else tuple(self.protocols)
        object.__setattr__(self, "protocols", protocols)
        object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))
        object.__setattr__(self, "young_prototype", tuple(self.young_prototype))
        object.__setattr__(self, "mature_prototype", tuple(self.mature_prototype))
        if not protocols or any(p not in PROTOCOLS for p in protocols):
            raise ConfigError(f"protocols must be drawn from {PROTOCOLS}, got {protocols}")
        if len(set(protocols)) != len(protocols):
            raise ConfigError("duplicate protocol")
        if self.matrix_class not in MATRIX_CLASSES:
            raise ConfigError(f"unknown matrix class {self.matrix_class!r}")
        for name in ("trials_per_pair", "num_pairs", "training_set_size", "training_set_count"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if self.sigma is not None and not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        if self.attempt_cap is not None and self.attempt_cap < 1:
            raise ConfigError("attempt_cap must be at least 1")
        if not self.m_values or min(self.m_values) < 0:
            raise ConfigError("m_values must be non-empty and non-negative")
        try:
            self.model()
            self.policy()
        except InvalidArgumentError as exc:
            raise ConfigError(str(exc)) from exc
        n = len(self.young_prototype)
        if max(self.m_values) > n and (
            self.matrix_class in (SINGLE_PIXEL, COLUMN_SUPPORTED_UNIFORM)
            or DECOMPOSITION in protocols
            or self.full_rank
        ):
            raise ConfigError(f"m may not exceed n = {n} for this configuration")
        if PIXEL in protocols and self.matrix_class != SINGLE_PIXEL:
            raise ConfigError("the pixel protocol needs single_pixel matrices")
        self.machine_index()

    def model(self) -> ForestModel:
        return ForestModel(self.young_prototype, self.mature_prototype, self.noise_std)

    def policy(self):
        """``("fixed", p)`` or ``("optimal", None)``."""
        if self.midpoint == "optimal":
            return ("optimal", None)
        kind, _, value = self.midpoint.partition(":")
        try:
            p = float(value)
        except ValueError:
            raise ConfigError(f"bad midpoint policy {self.midpoint!r}") from None
        if kind != "fixed" or not 0 < p < 1:
            raise ConfigError(f"bad midpoint policy {self.midpoint!r}")
        return ("fixed", p)

    def machine_index(self):
        """``None`` for the ideal machine, else the training-set index."""
        if self.machine == "ideal":
            return None
        kind, _, value = self.machine.partition(":")
        if kind != "trained" or not value.isdigit() or int(value) >= self.training_set_count:
            raise ConfigError(f"machine must be 'ideal' or 'trained:<k>', got {self.machine!r}")
        return int(value)

    def sigma_for(self, protocol: str):
        if protocol in (PIXEL, DECOMPOSITION):
            return None
        if self.sigma is not None:
            return float(self.sigma)
        return DEFAULT_RODEO_SIGMA if protocol == RODEO else DEFAULT_GAUSSIAN_SIGMA

    def cap_for(self, m: int) -> int:
        return self.attempt_cap if self.attempt_cap is not None else default_attempt_cap(m)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d


@dataclass(frozen=True)
class TrialRecord:
    pair_id: int
    trial_id: int
    protocol: str
    matrix_class: str
    m: int
    sigma: float | None
    p: float
    succeeded: bool
    attempts: int
    sampled_bits: str | None = None
    rll: float | None = None


def stream(master_seed: int, *key) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=tuple(key)))


# Pool and machine -----------------------------------------------------------


@dataclass(frozen=True)
class Pair:
    pair_id: int
    signal: np.ndarray
    matrices: dict = field(repr=False)  # m -> SensingMatrix


def build_pool(config: ExperimentConfig):
    """The shared ``(y, A)`` pairs; identical for every protocol in a run."""
    model = config.model()
    n = model.num_pixels
    pairs = []
    for k in range(config.num_pairs):
        y = sample_signal(model, stream(config.master_seed, POOL, k))
        mats = {}
        for m in config.m_values:
            rng = stream(config.master_seed, MATRIX, k, m)
            mats[m] = generate_matrix(
                config.matrix_class,
                m,
                n,
                rng,
                distinct_pixels=config.distinct_pixels,
                require_full_rank=config.full_rank and m <= n,
            )
        pairs.append(Pair(k, y, mats))
    return pairs


def training_sets(config: ExperimentConfig):
    return build_training_sets(
        config.model(),
        config.training_set_count,
        config.training_set_size,
        stream(config.master_seed, TRAINING),
    )


def machine_signals(config: ExperimentConfig):
    idx = config.machine_index()
    if idx is None:
        return ideal_training_set(config.model()).signals
    return training_sets(config)[idx].signals


def resolve_machine_spec(config: ExperimentConfig) -> TrainingSet:
    """Training set (with its midpoint) the Born machine is prepared from."""
    signals = machine_signals(config)
    kind, p = config.policy()
    if kind == "optimal":
        p, _ = optimize_midpoint(signals, DEFAULT_ENTROPY_STEP)
    return TrainingSet(signals, p)


def prepare_machine(machine_spec: TrainingSet) -> QuantumState:
    return quantum_average_direct(machine_spec).state


# Kernels ---------------------------------------------------------------------


class TrialKernel:
    """Precomputed single-pair, single-m projection for repeated trials."""

    def __init__(self, protocol, machine, A, x, sigma=None):
        self.protocol = protocol
        self.sigma = sigma
        self.error = ""
        self.success_prob = 0.0
        self.post_probs = None
        self.dim = machine.dim
        try:
            self._build(protocol, machine, A, np.asarray(x, dtype=float))
        except (RankDeficientError, IncompatibleOutcomeError, InvalidArgumentError) as exc:
            self.error = f"{type(exc).__name__}: {exc}"
            self.success_prob = 0.0

    def _build(self, protocol, machine, A, x):
        if protocol == QITE:
            outcome = gaussian_project(machine, A, x, self.sigma)
            self.success_prob = 1.0
            self.post_probs = full_distribution(outcome.state)
        elif protocol == PIXEL:
            want = single_pixel_targets(A, x)
            if want is None:
                raise InvalidArgumentError("contradictory single-pixel rows")
            qubits = tuple(sorted(want))
            self._postselect(machine, qubits, tuple(want[q] for q in qubits), ())
        elif protocol == DECOMPOSITION:
            factors = decompose_sensing_matrix(A)
            syndrome = compute_syndrome(factors, x)
            rotated = apply_gates(machine, factors.circuit())
            self._postselect(
                rotated, tuple(range(factors.m)), syndrome.discretized_bits, factors.inverse_circuit()
            )
        elif protocol == RODEO:
            entries = A.entries if isinstance(A, SensingMatrix) else np.asarray(A, float)
            self.deviations = np.array(
                [DiagonalOperator(entries[i], x[i]).spectrum() for i in range(entries.shape[0])]
            ).reshape(entries.shape[0], machine.dim)
            self.base_probs = full_distribution(machine)
            if entries.shape[0] == 0:
                self.success_prob = 1.0
                self.post_probs = self.base_probs
        else:
            raise InvalidArgumentError(f"unknown protocol {protocol!r}")

    def _postselect(self, state, qubits, bits, undo):
        if not qubits:
            self.success_prob = 1.0
            self.post_probs = full_distribution(apply_gates(state, undo))
            return
        marg = marginal_distribution(state, qubits)
        self.success_prob = float(marg[sum(b << j for j, b in enumerate(bits))])
        try:
            _, collapsed = postselect_subset(state, qubits, bits)
        except IncompatibleOutcomeError:
            self.success_prob = 0.0
            return
        self.post_probs = full_distribution(apply_gates(collapsed, undo))

    def attempt(self, rng, cap):
        """Run up to ``cap`` attempts; returns ``(succeeded, attempts, probs)``."""
        if self.error:
            return False, 0, None
        if self.protocol == RODEO and self.deviations.shape[0] > 0:
            return self._rodeo_attempts(rng, cap)
        if self.success_prob >= 1.0:
            return True, 1, self.post_probs
        if self.success_prob <= 0.0:
            return False, cap, None
        k = int(rng.geometric(self.success_prob))
        if k > cap:
            return False, cap, None
        return True, k, self.post_probs

    def expected_outcome(self):
        """Single-attempt success probability and post-success distribution.

        For Rodeo both are averaged over the random evolution times, using
        ``E[cos^2(d tau / 2)] = (1 + exp(-d^2 sigma^2 / 2)) / 2`` per row.
        """
        if self.error:
            return 0.0, None
        if self.protocol != RODEO or self.deviations.shape[0] == 0:
            return self.success_prob, self.post_probs
        keep = np.prod(0.5 * (1.0 + np.exp(-0.5 * (self.deviations * self.sigma) ** 2)), axis=0)
        joint = keep * self.base_probs
        total = float(joint.sum())
        return total, (joint / total if total > 0 else None)

    def _rodeo_attempts(self, rng, cap):
        m = self.deviations.shape[0]
        used = 0
        while used < cap:
            size = min(_RODEO_CHUNK, cap - used)
            tau = rng.normal(0.0, self.sigma, size=(size, m))
            # P(all controls 0 | z) = prod_i cos^2((nu_iz - x_i) tau_i / 2)
            w = np.prod(np.cos(0.5 * tau[:, :, None] * self.deviations[None]) ** 2, axis=1)
            joint = w * self.base_probs
            p_ok = joint.sum(axis=1)
            hits = np.flatnonzero(rng.random(size) < p_ok)
            if hits.size:
                j = int(hits[0])
                return True, used + j + 1, joint[j] / p_ok[j]
            used += size
        return False, cap, None


def _sample_bits(probs, rng, n):
    z = int(rng.choice(probs.size, p=probs / probs.sum()))
    return z, bits_of(z, n)


def run_trial(
    machine_spec: TrainingSet,
    A: SensingMatrix,
    x,
    y,
    config: ExperimentConfig,
    rng,
    *,
    protocol=None,
    pair_id=0,
    trial_id=0,
    kernel: TrialKernel | None = None,
    literal=False,
    rll_lookup=None,
) -> TrialRecord:
    """One projection-and-sampling trial, scored by RLL against ``y``.

    Upstream errors (rank deficiency, annihilation, ...) come back as failed
    records rather than exceptions.
    """
    protocol = protocol or config.protocols[0]
    sigma = config.sigma_for(protocol)
    p = machine_spec.midpoint
    m = A.m
    cap = config.cap_for(m)
    n = machine_spec.num_pixels
    base = dict(
        pair_id=pair_id, trial_id=trial_id, protocol=protocol,
        matrix_class=A.matrix_class, m=m, sigma=sigma, p=p,
    )
    if literal:
        succeeded, attempts, state = _literal_projection(machine_spec, A, x, protocol, sigma, cap, rng)
        if not succeeded:
            return TrialRecord(**base, succeeded=False, attempts=attempts)
        bits, _ = measure_subset(state, range(n), rng)
        z = sum(b << q for q, b in enumerate(bits))
    else:
        if kernel is None:
            kernel = TrialKernel(protocol, prepare_machine(machine_spec), A, x, sigma)
        succeeded, attempts, probs = kernel.attempt(rng, cap)
        if not succeeded:
            return TrialRecord(**base, succeeded=False, attempts=attempts)
        z, bits = _sample_bits(probs, rng, n)
    table = rll_lookup if rll_lookup is not None else rll_table(y, p)
    return TrialRecord(
        **base, succeeded=True, attempts=attempts,
        sampled_bits=format_bits(bits), rll=float(table[z]),
    )


def _literal_projection(machine_spec, A, x, protocol, sigma, cap, rng):
    """Attempt-by-attempt projection, re-preparing the machine every attempt."""
    try:
        factors = decompose_sensing_matrix(A) if protocol == DECOMPOSITION else None
        if protocol == QITE:
            outcome = gaussian_project(prepare_machine(machine_spec), A, x, sigma)
            return True, 1, outcome.state

        def attempt():
            machine = prepare_machine(machine_spec)
            if protocol == PIXEL:
                return pixel_postselect(machine, A, x, rng)
            if protocol == DECOMPOSITION:
                return project_decomposition(machine, factors, x, rng)
            return project_rodeo(machine, A, x, sigma, rng)

        outcome = repeat_until_success(attempt, cap)
    except (RankDeficientError, IncompatibleOutcomeError, InvalidArgumentError):
        return False, 0, None
    return outcome.succeeded, outcome.attempts_used, outcome.state


# Experiment ------------------------------------------------------------------


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    machine_spec: TrainingSet
    records: list
    entropy: list  # (training_set_id, p, entropy)

    @property
    def summary(self):
        from qcsense.report import summarize

        return summarize(self.records)


def _work_item(args):
    config, machine_spec, machine, pair, m, protocol = args
    A = pair.matrices[m]
    x = apply_sensing(A, pair.signal)
    sigma = config.sigma_for(protocol)
    kernel = TrialKernel(protocol, machine, A, x, sigma)
    table = rll_table(pair.signal, machine_spec.midpoint)
    pidx = PROTOCOLS.index(protocol)
    return [
        run_trial(
            machine_spec, A, x, pair.signal, config,
            stream(config.master_seed, TRIAL, pair.pair_id, m, t, pidx),
            protocol=protocol, pair_id=pair.pair_id, trial_id=t,
            kernel=kernel, rll_lookup=table,
        )
        for t in range(config.trials_per_pair)
    ]


def entropy_rows(config: ExperimentConfig, step=DEFAULT_ENTROPY_STEP):
    """Entropy-vs-midpoint curves for the ideal set and every training set."""
    rows = []
    sets = [("ideal", ideal_training_set(config.model()).signals)]
    sets += [(str(i), T.signals) for i, T in enumerate(training_sets(config))]
    for name, signals in sets:
        rows.extend((name, p, s) for p, s in entropy_curve(signals, step))
    return rows


def run_experiment(config: ExperimentConfig, workers: int = 1, with_entropy=True) -> ExperimentResult:
    """Run every (pair, m, protocol) cell; output is independent of ``workers``."""
    machine_spec = resolve_machine_spec(config)
    machine = prepare_machine(machine_spec)
    pool = build_pool(config)
    items = [
        (config, machine_spec, machine, pair, m, protocol)
        for protocol in config.protocols
        for pair in pool
        for m in config.m_values
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(_work_item, items, chunksize=max(1, len(items) // (4 * workers))))
    else:
        chunks = [_work_item(item) for item in items]
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (PROTOCOLS.index(r.protocol), r.m, r.pair_id, r.trial_id))
    entropy = entropy_rows(config) if with_entropy else []
    return ExperimentResult(config, machine_spec, records, entropy)


def failure_counts(records, protocol, m):
    """Per-pair failure counts for one protocol and m, keyed by pair id."""
    counts = {}
    for r in records:
        if r.protocol == protocol and r.m == m:
            counts[r.pair_id] = counts.get(r.pair_id, 0) + (not r.succeeded)
    return counts


def expected_trials_uniform(m: int) -> float:
    """Mean attempts to a matching syndrome for a uniform machine: ``2^m``."""
    return float(2**m)
