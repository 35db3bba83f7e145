"""Shared argument parsing and plotting for the sweep scripts."""
from __future__ import annotations

import argparse
import math
from dataclasses import replace
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from qcsense.experiment import ExperimentConfig, run_experiment  # noqa: E402
from qcsense.report import report, summarize  # noqa: E402


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairs", type=int, default=32)
    p.add_argument("--trials", type=int, default=1024)
    p.add_argument("--workers", type=int, default=1)
    return p


def base_config(args, **overrides) -> ExperimentConfig:
    config = ExperimentConfig(master_seed=args.seed, num_pairs=args.pairs, trials_per_pair=args.trials)
    return replace(config, **overrides)


def run_variant(config: ExperimentConfig, out_dir: Path, workers: int):
    """Run one configuration and return its summary rows; CSVs go to ``out_dir``."""
    result = run_experiment(config, workers=workers, with_entropy=False)
    report(result.records, out_dir, plots=False)
    return summarize(result.records)


def plot_curves(curves: dict, metric: str, ylabel: str, path: Path):
    """``curves`` maps a label to summary rows of one protocol; draws median and IQR."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, rows in curves.items():
        rows = sorted(rows, key=lambda r: r["m"])
        ms = [r["m"] for r in rows]
        mid = [_finite(r[f"median_{metric}"]) for r in rows]
        lo = [_finite(r[f"q1_{metric}"]) for r in rows]
        hi = [_finite(r[f"q3_{metric}"]) for r in rows]
        line, = ax.plot(ms, mid, marker="o", label=label)
        ax.fill_between(ms, lo, hi, alpha=0.2, color=line.get_color())
    ax.set_xlabel("measurements m")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    print(path)


def _finite(v):
    return v if math.isfinite(v) else math.nan
