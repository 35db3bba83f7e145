"""Rodeo failures and median RLL for several sigma, with Decomposition failures for reference.

Every trial is a single attempt, so a failed syndrome discards the trial.
"""
import math

from _common import base_config, parser, plot_curves, run_variant


def main():
    p = parser("Rodeo sigma sweep against the Decomposition protocol")
    p.add_argument("--sigmas", type=float, nargs="+", default=[0.5, 1.0, 2.0, math.pi])
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    curves = {}
    for sigma in args.sigmas:
        config = base_config(args, protocols=("rodeo",), sigma=sigma, attempt_cap=1)
        curves[f"Rodeo sigma = {sigma:.3g}"] = run_variant(config, args.out / f"rodeo_{sigma:.3g}", args.workers)
    config = base_config(args, protocols=("decomposition",), attempt_cap=1)
    decomposition = run_variant(config, args.out / "decomposition", args.workers)
    plot_curves({**curves, "Decomposition": decomposition}, "failures", "failures per pair",
                args.out / "failures.png")
    plot_curves(curves, "median_rll", "median RLL", args.out / "median_rll.png")


if __name__ == "__main__":
    main()
