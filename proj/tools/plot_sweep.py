"""Plot boundary curves from one or more `seqtest sweep` CSV files.

    seqtest sweep ce:1,1 --K-min 8.05 --K-max 100 --points 200 --out ce.csv
    seqtest sweep l1 --K-min 8.05 --K-max 100 --points 200 --out l1.csv
    python3 tools/plot_sweep.py ce.csv l1.csv -o boundaries.png
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("csv", nargs="+", type=Path)
    parser.add_argument("-o", "--output", type=Path, default=Path("boundaries.png"))
    parser.add_argument("--logx", action="store_true")
    args = parser.parse_args()

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in args.csv:
        df = pd.read_csv(path).dropna(subset=["A", "B"])
        (line,) = ax.plot(df["K"], df["A"], label=path.stem)
        ax.plot(df["K"], df["B"], color=line.get_color())
    ax.set_xlabel("K")
    ax.set_ylabel("boundary")
    ax.set_ylim(0, 1)
    if args.logx:
        ax.set_xscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
