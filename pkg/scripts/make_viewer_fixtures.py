#!/usr/bin/env python3
"""Regenerate the golden viewer fixture trio under fixtures/viewer/.

The numbers are a small frozen snapshot in the shape of the benchmark output:
four algorithm variants, two cells, ten runs, including one undefined ('*')
and one missing ('-') cell so every sentinel path gets exercised downstream.
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from causalbench.dataio import ConfigManifest, StatsTable, write_tables

ALGS = [
    (1, "pc", {"alpha": "0.001", "conflict": "priority"}),
    (2, "pc-stable", {"alpha": "0.001", "conflict": "priority"}),
    (3, "cpc", {"alpha": "0.001", "conflict": "priority"}),
    (4, "fges", {"score": "sem-bic", "penalty": "2", "faithfulness": "false"}),
]

MEANS = {
    (1, 100, 4, 500): dict(AP=0.99, AR=0.78, AHP=0.68, AHR=0.48, McAdj=0.87, McArrow=0.27, E=0.06),
    (2, 100, 4, 500): dict(AP=0.99, AR=0.78, AHP=0.66, AHR=0.47, McAdj=0.87, McArrow=0.25, E=0.05),
    (3, 100, 4, 500): dict(AP=0.99, AR=0.78, AHP=0.98, AHR=0.3, McAdj=0.87, McArrow=0.5, E=0.08),
    (4, 100, 4, 500): dict(AP=0.91, AR=0.96, AHP=0.83, AHR=0.83, McAdj=0.93, McArrow=0.67, E=0.13),
    (1, 50, 2, 1000): dict(AP=0.96, AR=0.97, AHP=0.79, AHR=0.61, McAdj=0.96, McArrow=0.47, E=0.04),
    (2, 50, 2, 1000): dict(AP=0.96, AR=0.97, AHP=0.78, AHR=0.62, McAdj=0.96, McArrow=0.46, E=0.05),
    (3, 50, 2, 1000): dict(AP=0.96, AR=0.97, AHP=None, AHR=0.0, McAdj=0.96, McArrow=0.0, E=0.08),
    (4, 50, 2, 1000): "missing",
}

STDS = {
    (1, 100, 4, 500): dict(AP=0.01, AR=0.03, AHP=0.05, AHR=0.04, McAdj=0.02, McArrow=0.05, E=0.01),
    (2, 100, 4, 500): dict(AP=0.01, AR=0.03, AHP=0.05, AHR=0.05, McAdj=0.02, McArrow=0.05, E=0.01),
    (3, 100, 4, 500): dict(AP=0.01, AR=0.03, AHP=0.02, AHR=0.04, McAdj=0.02, McArrow=0.04, E=0.02),
    (4, 100, 4, 500): dict(AP=0.02, AR=0.01, AHP=0.03, AHR=0.03, McAdj=0.01, McArrow=0.04, E=0.03),
    (1, 50, 2, 1000): dict(AP=0.02, AR=0.01, AHP=0.06, AHR=0.05, McAdj=0.01, McArrow=0.06, E=0.01),
    (2, 50, 2, 1000): dict(AP=0.02, AR=0.01, AHP=0.06, AHR=0.05, McAdj=0.01, McArrow=0.06, E=0.01),
    (3, 50, 2, 1000): dict(AP=0.02, AR=0.01, AHP=None, AHR=0.0, McAdj=0.01, McArrow=0.0, E=0.02),
    (4, 50, 2, 1000): "missing",
}


def build(table_values):
    table = StatsTable()
    for (alg, vars_, deg, n), stats in sorted(table_values.items()):
        if stats == "missing":
            stats = {}  # every stat falls back to '-'
        table.add(alg, vars_, deg, n, stats)
    table.sort()
    return table


def main():
    outdir = os.path.join(os.path.dirname(__file__), "..", "fixtures", "viewer")
    manifest = ConfigManifest(
        algorithms=ALGS,
        vars_levels=[50, 100],
        deg_levels=[2, 4],
        n_levels=[500, 1000],
        runs=10,
    )
    paths = write_tables(build(MEANS), build(STDS), manifest, outdir)
    for p in sorted(paths.values()):
        print("wrote", os.path.relpath(p))


if __name__ == "__main__":
    main()
