"""Command-line entry point.

Subcommands::

    train       prepare the Born machine and write its distribution
    sense       draw one (y, A) pair from the pool and write x = Ay
    project     project the machine for one (y, A) pair, write the distribution
    sample      run repeated trials for one (y, A) pair
    experiment  run the full Monte-Carlo sweep
    report      rebuild summary and plots from an existing trials.csv

Exit status is 0 on success, 1 for configuration errors and 2 for failures
at run time.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from qcsense.errors import InvalidArgumentError
from qcsense.experiment import (
    PROTOCOLS,
    TRIAL,
    ConfigError,
    ExperimentConfig,
    Pair,
    TrialKernel,
    build_pool,
    prepare_machine,
    resolve_machine_spec,
    run_experiment,
    run_trial,
    stream,
)
from qcsense.metrics import rll_table
from qcsense.report import read_entropy, read_trials, report, write_trials
from qcsense.sensing import MATRIX_CLASSES, SensingMatrix, apply_sensing
from qcsense.statevector import bits_of, format_bits, full_distribution
from qcsense.training import distribution_entropy, nll, quantum_average_direct, success_probability

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _m_list(text: str) -> tuple:
    """``"3"``, ``"0-6"`` or ``"1,3,5"``."""
    try:
        if "-" in text:
            lo, hi = (int(v) for v in text.split("-", 1))
            return tuple(range(lo, hi + 1))
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad m specification {text!r}") from None


def _protocols(text: str) -> tuple:
    out = tuple(p.strip() for p in text.split(",") if p.strip())
    bad = [p for p in out if p not in PROTOCOLS]
    if bad or not out:
        raise argparse.ArgumentTypeError(f"protocols must be drawn from {PROTOCOLS}")
    return out


def _add_common(p: argparse.ArgumentParser, *, out_required=True):
    p.add_argument("--config", type=Path, help="JSON file mirroring ExperimentConfig")
    p.add_argument("--protocol", type=_protocols, help=f"comma-separated subset of {','.join(PROTOCOLS)}")
    p.add_argument("--matrix-class", choices=MATRIX_CLASSES)
    p.add_argument("--m", type=_m_list, help="measurement count(s): 3, 0-6 or 1,3,5")
    p.add_argument("--sigma", type=float)
    p.add_argument("--midpoint", help="fixed:<p> or optimal")
    p.add_argument("--trials", type=int)
    p.add_argument("--pairs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--machine", help="ideal or trained:<k>")
    p.add_argument("--attempt-cap", type=int)
    p.add_argument("--out", type=Path, required=out_required)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcsense", description="Born-machine compressive sensing simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    _add_common(sub.add_parser("train", help="prepare the Born machine"))
    p = sub.add_parser("sense", help="draw y and A, write x = Ay")
    _add_common(p)
    p.add_argument("--pair", type=int, default=0, help="pair index within the seeded pool")
    for name, text in (("project", "projected distribution for one pair"),
                       ("sample", "repeated trials for one pair")):
        p = sub.add_parser(name, help=text)
        _add_common(p)
        p.add_argument("--pair", type=int, default=0, help="pair index within the seeded pool")
        p.add_argument("--input", type=Path, help="directory written by 'sense' to reuse")

    p = sub.add_parser("experiment", help="full Monte-Carlo sweep")
    _add_common(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-plots", action="store_true")

    p = sub.add_parser("report", help="summary and plots from trials.csv")
    p.add_argument("--input", type=Path, required=True, help="directory holding trials.csv")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--protocol", type=_protocols, help="protocol order for the summary")
    p.add_argument("--no-plots", action="store_true")
    return parser


_FLAG_FIELDS = {
    "protocol": "protocols",
    "matrix_class": "matrix_class",
    "m": "m_values",
    "sigma": "sigma",
    "midpoint": "midpoint",
    "trials": "trials_per_pair",
    "pairs": "num_pairs",
    "seed": "master_seed",
    "machine": "machine",
    "attempt_cap": "attempt_cap",
}


def config_from_args(args) -> ExperimentConfig:
    """JSON file first, then command-line flags on top."""
    data = {}
    if args.config is not None:
        data = ExperimentConfig.from_json(args.config).to_dict()
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[name] = value
    return ExperimentConfig.from_dict(data)


def _single_m(config: ExperimentConfig) -> int:
    if len(config.m_values) != 1:
        raise ConfigError("this command takes a single --m value")
    return config.m_values[0]


def _write_distribution(path, probs, n):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "bits", "probability"])
        for z, pz in enumerate(probs):
            w.writerow([z, format_bits(bits_of(z, n)), f"{pz:.17g}"])


def _pair(config: ExperimentConfig, args):
    """The requested (y, A, x), either regenerated or read from a 'sense' directory."""
    if getattr(args, "input", None) is not None:
        meta = json.loads((args.input / "signal.json").read_text())
        A = SensingMatrix.load(args.input / "matrix.csv")
        y = np.array(meta["y"], dtype=float)
        return int(meta.get("pair_id", 0)), y, A
    m = _single_m(config)
    if not 0 <= args.pair < config.num_pairs:
        raise ConfigError(f"--pair must lie in [0, {config.num_pairs})")
    pair: Pair = build_pool(config)[args.pair]
    return pair.pair_id, pair.signal, pair.matrices[m]


def cmd_train(config, args):
    machine_spec = resolve_machine_spec(config)
    machine = quantum_average_direct(machine_spec)
    n = machine_spec.num_pixels
    args.out.mkdir(parents=True, exist_ok=True)
    _write_distribution(args.out / "machine.csv", full_distribution(machine.state), n)
    info = {
        "machine": config.machine,
        "midpoint": machine_spec.midpoint,
        "training_size": len(machine_spec),
        "circuit_success_probability": success_probability(machine_spec.padded()),
        "nll": nll(machine_spec, machine),
        "entropy": distribution_entropy(machine),
    }
    (args.out / "machine.json").write_text(json.dumps(info, indent=2) + "\n")
    print(json.dumps(info))


def cmd_sense(config, args):
    pair_id, y, A = _pair(config, args)
    x = apply_sensing(A, y)
    args.out.mkdir(parents=True, exist_ok=True)
    A.save(args.out / "matrix.csv")
    meta = {"pair_id": pair_id, "y": y.tolist(), "x": x.tolist()}
    (args.out / "signal.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(json.dumps(meta))


def cmd_project(config, args):
    _, y, A = _pair(config, args)
    machine_spec = resolve_machine_spec(config)
    x = apply_sensing(A, y)
    args.out.mkdir(parents=True, exist_ok=True)
    for protocol in config.protocols:
        kernel = TrialKernel(protocol, prepare_machine(machine_spec), A, x, config.sigma_for(protocol))
        if kernel.error:
            raise RuntimeError(f"{protocol}: {kernel.error}")
        prob, post = kernel.expected_outcome()
        if post is None:
            raise RuntimeError(f"{protocol}: no state survives the projection")
        _write_distribution(args.out / f"projected_{protocol}.csv", post, machine_spec.num_pixels)
        print(f"{protocol}: single-attempt success probability {prob:.6g}")


def cmd_sample(config, args):
    pair_id, y, A = _pair(config, args)
    machine_spec = resolve_machine_spec(config)
    machine = prepare_machine(machine_spec)
    x = apply_sensing(A, y)
    table = rll_table(y, machine_spec.midpoint)
    records = []
    for protocol in config.protocols:
        kernel = TrialKernel(protocol, machine, A, x, config.sigma_for(protocol))
        pidx = PROTOCOLS.index(protocol)
        records += [
            run_trial(machine_spec, A, x, y, config, stream(config.master_seed, TRIAL, pair_id, A.m, t, pidx),
                      protocol=protocol, pair_id=pair_id, trial_id=t, kernel=kernel, rll_lookup=table)
            for t in range(config.trials_per_pair)
        ]
    args.out.mkdir(parents=True, exist_ok=True)
    write_trials(records, args.out / "trials.csv")
    ok = sum(r.succeeded for r in records)
    print(f"{ok}/{len(records)} trials succeeded")


def cmd_experiment(config, args):
    if args.workers < 1:
        raise ConfigError("--workers must be at least 1")
    result = run_experiment(config, workers=args.workers)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "config.json").write_text(json.dumps(config.to_dict(), indent=2) + "\n")
    for path in report(result.records, args.out, result.entropy, plots=not args.no_plots):
        print(path)


def cmd_report(args):
    records = read_trials(args.input / "trials.csv")
    entropy_path = args.input / "entropy.csv"
    entropy = read_entropy(entropy_path) if entropy_path.exists() else None
    for path in report(records, args.out, entropy, args.protocol, plots=not args.no_plots):
        print(path)


_COMMANDS = {
    "train": cmd_train,
    "sense": cmd_sense,
    "project": cmd_project,
    "sample": cmd_sample,
    "experiment": cmd_experiment,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            cmd_report(args)
            return EXIT_OK
        config = config_from_args(args)
        _COMMANDS[args.command](config, args)
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - every other failure maps to one status
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
