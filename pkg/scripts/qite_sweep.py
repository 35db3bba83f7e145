"""QITE median RLL against m per training set, and for the default versus optimal midpoint."""
from _common import base_config, parser, plot_curves, run_variant


def main():
    args = parser("QITE sweeps over training sets and midpoint policies").parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    per_set = {}
    for machine in ("ideal", "trained:0", "trained:1", "trained:2"):
        config = base_config(args, protocols=("qite",), machine=machine, sigma=0.5)
        per_set[machine] = run_variant(config, args.out / machine.replace(":", "_"), args.workers)
    plot_curves(per_set, "median_rll", "median RLL", args.out / "qite_by_training_set.png")

    per_midpoint = {"p = 0.5": per_set["ideal"]}
    config = base_config(args, protocols=("qite",), midpoint="optimal", sigma=0.5)
    per_midpoint["optimal p"] = run_variant(config, args.out / "ideal_optimal", args.workers)
    plot_curves(per_midpoint, "median_rll", "median RLL", args.out / "qite_by_midpoint.png")


if __name__ == "__main__":
    main()
