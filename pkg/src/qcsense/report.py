"""CSV and plot output for experiment records."""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

TRIAL_COLUMNS = (
    "pair_id", "trial_id", "protocol", "matrix_class", "m", "sigma", "p",
    "succeeded", "attempts", "sampled_bits", "rll",
)
SUMMARY_COLUMNS = (
    "protocol", "matrix_class", "m", "pairs",
    "q1_median_rll", "median_median_rll", "q3_median_rll",
    "q1_failures", "median_failures", "q3_failures",
)
ENTROPY_COLUMNS = ("training_set_id", "p", "entropy")


def fmt_float(v) -> str:
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def quantile(values, q: float) -> float:
    """Linear-interpolation quantile (numpy's default) that tolerates ``-inf``."""
    v = sorted(float(x) for x in values)
    if not v:
        return math.nan
    pos = q * (len(v) - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, len(v) - 1)
    frac = pos - lo
    if frac == 0.0 or v[lo] == v[hi]:
        return v[lo]
    if math.isinf(v[lo]) or math.isinf(v[hi]):
        return v[lo] if math.isinf(v[lo]) else v[hi]
    return v[lo] + (v[hi] - v[lo]) * frac


def per_pair_stats(records, protocol, matrix_class, m):
    """``{pair_id: (median RLL over successes or None, failure count)}``."""
    rlls, fails = {}, {}
    for r in records:
        if (r.protocol, r.matrix_class, r.m) != (protocol, matrix_class, m):
            continue
        fails.setdefault(r.pair_id, 0)
        rlls.setdefault(r.pair_id, [])
        if r.succeeded:
            rlls[r.pair_id].append(r.rll)
        else:
            fails[r.pair_id] += 1
    return {
        k: (quantile(rlls[k], 0.5) if rlls[k] else None, fails[k]) for k in sorted(fails)
    }


def summarize(records, protocol_order=None):
    """One row per (protocol, matrix class, m) present in ``records``.

    Protocols follow ``protocol_order`` when given, else the canonical order.
    """
    keys = sorted({(r.protocol, r.matrix_class, r.m) for r in records},
                  key=lambda k: (_order(k[0], protocol_order), k[1], k[2]))
    rows = []
    for protocol, klass, m in keys:
        stats = per_pair_stats(records, protocol, klass, m)
        medians = [s[0] for s in stats.values() if s[0] is not None]
        fails = [s[1] for s in stats.values()]
        rows.append(dict(
            protocol=protocol, matrix_class=klass, m=m, pairs=len(medians),
            q1_median_rll=quantile(medians, 0.25),
            median_median_rll=quantile(medians, 0.5),
            q3_median_rll=quantile(medians, 0.75),
            q1_failures=quantile(fails, 0.25),
            median_failures=quantile(fails, 0.5),
            q3_failures=quantile(fails, 0.75),
        ))
    return rows


def _order(protocol, order):
    if order is None:
        from qcsense.experiment import PROTOCOLS as order
    order = list(order)
    return (order.index(protocol), protocol) if protocol in order else (len(order), protocol)


def trial_row(r):
    return [
        r.pair_id, r.trial_id, r.protocol, r.matrix_class, r.m,
        fmt_float(r.sigma), fmt_float(r.p), int(r.succeeded), r.attempts,
        r.sampled_bits or "", fmt_float(r.rll) if r.succeeded else "",
    ]


def write_trials(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIAL_COLUMNS)
        w.writerows(trial_row(r) for r in records)


def write_summary(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for row in rows:
            w.writerow([
                fmt_float(row[c]) if isinstance(row[c], float) else row[c]
                for c in SUMMARY_COLUMNS
            ])


def write_entropy(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ENTROPY_COLUMNS)
        w.writerows([name, fmt_float(p), fmt_float(s)] for name, p, s in rows)


def read_trials(path):
    """Parse ``trials.csv`` back into :class:`TrialRecord` objects."""
    from qcsense.experiment import TrialRecord

    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            ok = row["succeeded"] == "1"
            out.append(TrialRecord(
                pair_id=int(row["pair_id"]), trial_id=int(row["trial_id"]),
                protocol=row["protocol"], matrix_class=row["matrix_class"],
                m=int(row["m"]), sigma=float(row["sigma"]) if row["sigma"] else None,
                p=float(row["p"]), succeeded=ok, attempts=int(row["attempts"]),
                sampled_bits=row["sampled_bits"] or None,
                rll=float(row["rll"]) if ok else None,
            ))
    return out


def read_entropy(path):
    with open(path, newline="") as fh:
        return [(r["training_set_id"], float(r["p"]), float(r["entropy"]))
                for r in csv.DictReader(fh)]


def _finite(v):
    return v if np.isfinite(v) else np.nan


def plot_summary(rows, out_dir):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    paths = []
    for metric, ylabel, fname in (
        ("median_rll", "median RLL", "median_rll.png"),
        ("failures", "failures per pair", "failures.png"),
    ):
        fig, ax = plt.subplots(figsize=(6, 4))
        for protocol, klass in sorted({(r["protocol"], r["matrix_class"]) for r in rows}):
            sel = sorted((r for r in rows if (r["protocol"], r["matrix_class"]) == (protocol, klass)),
                         key=lambda r: r["m"])
            ms = [r["m"] for r in sel]
            mid = [_finite(r[f"median_{metric}"]) for r in sel]
            lo = [_finite(r[f"q1_{metric}"]) for r in sel]
            hi = [_finite(r[f"q3_{metric}"]) for r in sel]
            line, = ax.plot(ms, mid, marker="o", label=f"{protocol} ({klass})")
            ax.fill_between(ms, lo, hi, alpha=0.2, color=line.get_color())
        ax.set_xlabel("measurements m")
        ax.set_ylabel(ylabel)
        ax.legend(fontsize="small")
        fig.tight_layout()
        path = out_dir / fname
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths


def plot_entropy(rows, out_dir):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for name in sorted({r[0] for r in rows}, key=lambda s: (s != "ideal", s)):
        pts = [(p, s) for n, p, s in rows if n == name]
        ax.plot([p for p, _ in pts], [s for _, s in pts], label=name)
    ax.set_xlabel("midpoint p")
    ax.set_ylabel("entropy (nats)")
    ax.legend(fontsize="small")
    fig.tight_layout()
    path = Path(out_dir) / "entropy.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def report(records, out_dir, entropy=None, protocol_order=None, plots=True):
    """Write trials.csv, summary.csv, entropy.csv (when given) and plots.

    Returns the list of written paths.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to report")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = summarize(records, protocol_order)
    paths = [out_dir / "trials.csv", out_dir / "summary.csv"]
    write_trials(records, paths[0])
    write_summary(rows, paths[1])
    if entropy:
        paths.append(out_dir / "entropy.csv")
        write_entropy(entropy, paths[-1])
    if plots:
        paths += plot_summary(rows, out_dir)
        if entropy:
            paths.append(plot_entropy(entropy, out_dir))
    return paths
