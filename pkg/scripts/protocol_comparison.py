"""Decomposition, Rodeo (sigma = pi) and QITE (sigma = 0.5) on each sensing-matrix class."""
from _common import base_config, parser, plot_curves, run_variant

from qcsense.sensing import MATRIX_CLASSES


def main():
    args = parser("protocol comparison per matrix class").parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for klass in MATRIX_CLASSES:
        config = base_config(args, protocols=("decomposition", "rodeo", "qite"),
                             matrix_class=klass, attempt_cap=1)
        rows = run_variant(config, args.out / klass, args.workers)
        curves = {p: [r for r in rows if r["protocol"] == p] for p in config.protocols}
        plot_curves(curves, "median_rll", "median RLL", args.out / f"{klass}.png")


if __name__ == "__main__":
    main()
