#!/usr/bin/env python3
"""End-to-end demo benchmark at desk scale.

Simulates a reduced grid (20/50 variables, degrees 2/4, n 200/500, 5 runs),
runs four algorithm variants, and writes stats.txt / std.txt / config.txt
ready for the viewer in frontend/index.html. Roughly two minutes single-core;
pass --workers to parallelize runs.

    python3 scripts/run_small_benchmark.py --out bench-small --workers 4
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from causalbench.dataio import ConfigManifest, write_tables
from causalbench.harness import (
    RunMatrixConfig,
    aggregate,
    generate_corpus,
    parse_algorithms,
    run_matrix,
)

ALG_SPEC = (
    "pc alpha=0.01; "
    "cpc-stable alpha=0.01; "
    "pc-stable-max alpha=0.01; "
    "fges score=sem-bic penalty=2 faithfulness=false"
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="bench-small")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int, default=20170803)
    parser.add_argument("--runs", type=int, default=5)
    args = parser.parse_args()

    cfg = RunMatrixConfig(
        cells=[(v, d, n) for v in (20, 50) for d in (2, 4) for n in (200, 500)],
        runs=args.runs,
        algorithms=parse_algorithms(ALG_SPEC),
        timeout_s=600.0,
        master_seed=args.seed,
        output_dir=args.out,
    )
    print(f"simulating {len(cfg.cells)} cells x {cfg.runs} runs ...")
    corpus = generate_corpus(cfg)
    print(f"running {len(cfg.algorithms)} algorithms ...")
    records = run_matrix(cfg, corpus, workers=args.workers)
    bad = [r for r in records if r.status != "OK"]
    if bad:
        for rec in bad:
            print(f"  {rec.status}: alg{rec.alg_id} vars{rec.vars}_deg{rec.deg}_n{rec.n} run{rec.run}")
    means, stds = aggregate(records)
    manifest = ConfigManifest(
        algorithms=[(s.alg_id, s.name, s.param_map) for s in cfg.algorithms],
        vars_levels=sorted({c[0] for c in cfg.cells}),
        deg_levels=sorted({c[1] for c in cfg.cells}),
        n_levels=sorted({c[2] for c in cfg.cells}),
        runs=cfg.runs,
    )
    paths = write_tables(means, stds, manifest, args.out)
    print("wrote " + ", ".join(sorted(paths.values())))
    print("load these three files in frontend/index.html to explore the results")
    return 1 if any(r.status == "ERROR" for r in records) else 0


if __name__ == "__main__":
    raise SystemExit(main())
