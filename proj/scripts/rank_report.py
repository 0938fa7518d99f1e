#!/usr/bin/env python3
"""Wins / average-rank table over per-dataset error rates.

Input: one or more CSVs with a `dataset` column and one column of error
rates per method (e.g. the archive_summary.csv from reproduce_archive.sh
joined with published numbers for other methods). Cells may be empty when
a method has no result for a dataset; measures are normalized per method
over the datasets it actually covers.

usage: rank_report.py results.csv [more.csv ...] [--exclude col,col]
"""

import argparse
import csv
import sys
from collections import defaultdict


def load(paths, exclude):
    rows = defaultdict(dict)  # dataset -> method -> error
    methods = []
    for path in paths:
        with open(path, newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None or "dataset" not in reader.fieldnames:
                sys.exit(f"{path}: need a 'dataset' column")
            for col in reader.fieldnames:
                if col == "dataset" or col in exclude:
                    continue
                if col not in methods:
                    methods.append(col)
            for row in reader:
                name = row["dataset"].strip()
                if not name:
                    continue
                for col, value in row.items():
                    if col == "dataset" or col in exclude or value is None:
                        continue
                    value = value.strip()
                    if not value:
                        continue
                    try:
                        rows[name][col] = float(value)
                    except ValueError:
                        pass
    return rows, methods


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csvs", nargs="+")
    parser.add_argument("--exclude", default="",
                        help="comma-separated columns to ignore")
    args = parser.parse_args()
    exclude = {c for c in args.exclude.split(",") if c}
    rows, methods = load(args.csvs, exclude)
    if not rows:
        sys.exit("no usable rows")

    wins = defaultdict(int)
    covered = defaultdict(int)
    rank_sum = defaultdict(float)
    for name, per_method in sorted(rows.items()):
        if len(per_method) < 2:
            continue
        best = min(per_method.values())
        ordered = sorted(per_method.items(), key=lambda kv: kv[1])
        # competition ranking with ties sharing the mean rank
        position = 0
        while position < len(ordered):
            tied = [m for m, v in ordered if v == ordered[position][1]]
            mean_rank = position + (len(tied) + 1) / 2.0
            for m in tied:
                rank_sum[m] += mean_rank
            position += len(tied)
        for method, value in per_method.items():
            covered[method] += 1
            if value == best:
                wins[method] += 1

    print(f"{'method':24s} {'wins':>10s} {'avg rank':>9s} {'datasets':>9s}")
    for method in methods:
        n = covered[method]
        if n == 0:
            continue
        print(f"{method:24s} {wins[method]:>4d}/{n:<5d} "
              f"{rank_sum[method] / n:>9.2f} {n:>9d}")


if __name__ == "__main__":
    main()
