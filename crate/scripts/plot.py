#!/usr/bin/env python3
"""Plot block and congestion against tree depth from a `shortcuts bench` CSV.

Usage: python3 scripts/plot.py rows.csv [out.png]

Needs matplotlib. Without an output path the figure is shown interactively.
"""

import csv
import math
import sys


def load(path):
    with open(path, newline="") as f:
        return [r for r in csv.DictReader(f) if not r["error"]]


def main():
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    import matplotlib.pyplot as plt

    rows = load(sys.argv[1])
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    for family in sorted({r["family"] for r in rows}):
        sel = [r for r in rows if r["family"] == family]
        d = [max(int(r["d_t"]), 1) for r in sel]
        lg = [max(math.ceil(math.log2(max(int(r["n"]), 2))), 1) for r in sel]
        left.scatter(d, [int(r["block"]) for r in sel], s=8, label=family)
        right.scatter([x * l * l for x, l in zip(d, lg)], [int(r["congestion"]) for r in sel], s=8, label=family)
    for ax, x, y in ((left, "d_T", "block"), (right, "d_T * log2(n)^2", "congestion")):
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel(x)
        ax.set_ylabel(y)
    left.legend(fontsize=7)
    fig.tight_layout()
    if len(sys.argv) > 2:
        fig.savefig(sys.argv[2], dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
