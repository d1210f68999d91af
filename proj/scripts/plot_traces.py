#!/usr/bin/env python3
"""Render optimality-gap figures from run trace CSVs.

Each input file must follow the trace schema emitted by the benchmark CLI:

    t,features_processed,wall_clock_s,objective,objective_gap

Produces a two-panel figure: gap versus iteration and gap versus features
processed, both on log scales. Rows with a missing or non-positive gap are
skipped (log axes cannot show them).

Usage:
    plot_traces.py out/trace_B8_avg.csv out/trace_B16_avg.csv -o gaps.png
"""

import argparse
import csv
import math
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_trace(path):
    ts, features, gaps = [], [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            gap = float(row["objective_gap"])
            if not math.isfinite(gap) or gap <= 0.0:
                continue
            ts.append(float(row["t"]))
            features.append(float(row["features_processed"]))
            gaps.append(gap)
    return ts, features, gaps


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("traces", nargs="+", type=pathlib.Path,
                        help="trace CSV files to overlay")
    parser.add_argument("-o", "--out", type=pathlib.Path,
                        default=pathlib.Path("traces.png"),
                        help="output image path (default: traces.png)")
    parser.add_argument("--title", default="optimality gap",
                        help="figure title")
    args = parser.parse_args()

    fig, (ax_t, ax_f) = plt.subplots(1, 2, figsize=(11, 4.5))
    plotted = 0
    for path in args.traces:
        ts, features, gaps = read_trace(path)
        if not gaps:
            print(f"warning: {path} has no positive-gap rows, skipping",
                  file=sys.stderr)
            continue
        label = path.stem
        ax_t.plot(ts, gaps, label=label)
        ax_f.plot(features, gaps, label=label)
        plotted += 1
    if plotted == 0:
        print("error: nothing to plot", file=sys.stderr)
        return 1

    for ax, xlabel in ((ax_t, "iteration t"), (ax_f, "features processed")):
        ax.set_xscale("symlog", linthresh=1.0)
        ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("F(x) - F*")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize="small")
    fig.suptitle(args.title)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
