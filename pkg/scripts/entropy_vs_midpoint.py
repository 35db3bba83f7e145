"""Entropy of the trained distribution against the midpoint p, per training set."""
from _common import base_config, parser

from qcsense.experiment import entropy_rows
from qcsense.report import plot_entropy, write_entropy


def main():
    p = parser("entropy versus midpoint for the ideal and random training sets")
    p.add_argument("--step", type=float, default=0.01)
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    rows = entropy_rows(base_config(args), args.step)
    write_entropy(rows, args.out / "entropy.csv")
    print(plot_entropy(rows, args.out))
    for name in sorted({r[0] for r in rows}, key=lambda s: (s != "ideal", s)):
        p_best, s_best = max(((p, s) for n, p, s in rows if n == name), key=lambda t: t[1])
        print(f"{name}: optimal p = {p_best:.2f}, entropy = {s_best:.4f}")


if __name__ == "__main__":
    main()
