"""Command-line driver: simulate a corpus, run the algorithm matrix, aggregate
records, and emit the stats/std/config tables for the viewer.

Typical session:

    causal-bench simulate --config bench.cfg
    causal-bench run --corpus bench-out/corpus --algs "pc alpha=0.01; fges penalty=2" \
        --timeout 600 --workers 4 --out bench-out
    causal-bench aggregate --records bench-out --out bench-out
    causal-bench report --out bench-out

The config file is line-oriented `key = value` text with keys master_seed,
vars, deg, n (comma-separated levels), runs, and out. The CAUSAL_BENCH_SEED
environment variable overrides master_seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import dataio, harness


def _parse_config_file(path: str) -> dict:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SystemExit(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


def _int_levels(raw: str) -> list[int]:
    return [int(x) for x in raw.split(",") if x.strip()]


def _matrix_config(args) -> harness.RunMatrixConfig:
    cfg = harness.RunMatrixConfig()
    if getattr(args, "config", None):
        raw = _parse_config_file(args.config)
        if "vars" in raw or "deg" in raw or "n" in raw:
            vars_levels = _int_levels(raw.get("vars", "50,100,500"))
            deg_levels = _int_levels(raw.get("deg", "2,4,6"))
            n_levels = _int_levels(raw.get("n", "100,500,1000"))
            cfg.cells = [
                (v, d, n) for v in vars_levels for d in deg_levels for n in n_levels
            ]
        if "runs" in raw:
            cfg.runs = int(raw["runs"])
        if "master_seed" in raw:
            cfg.master_seed = int(raw["master_seed"])
        if "out" in raw:
            cfg.output_dir = raw["out"]
    if getattr(args, "out", None):
        cfg.output_dir = args.out
    if os.environ.get(harness.SEED_ENV_VAR):
        cfg.master_seed = int(os.environ[harness.SEED_ENV_VAR])
    return cfg


def _cmd_simulate(args) -> int:
    cfg = _matrix_config(args)
    corpus = harness.generate_corpus(cfg)
    count = sum(1 for _ in cfg.cells) * cfg.runs
    print(f"wrote {count} dataset/graph pairs under {corpus}")
    return 0


def _cmd_run(args) -> int:
    cfg = _matrix_config(args)
    cfg.algorithms = harness.parse_algorithms(args.algs)
    cfg.timeout_s = args.timeout
    cells = _cells_in_corpus(args.corpus)
    if cells:
        cfg.cells, cfg.runs = cells
    records = harness.run_matrix(cfg, args.corpus, workers=args.workers)
    errors = [r for r in records if r.status == "ERROR"]
    timeouts = [r for r in records if r.status == "TIMEOUT"]
    print(
        f"{len(records)} runs: {len(records) - len(errors) - len(timeouts)} ok, "
        f"{len(timeouts)} timeout, {len(errors)} error"
    )
    for rec in errors:
        print(f"  ERROR alg{rec.alg_id} vars{rec.vars}_deg{rec.deg}_n{rec.n} run{rec.run}")
    return 1 if errors else 0


def _cells_in_corpus(corpus_dir: str):
    """Infer (cells, runs) from the corpus directory tree."""
    cells = []
    runs = 0
    if not os.path.isdir(corpus_dir):
        raise SystemExit(f"corpus directory {corpus_dir!r} not found")
    for entry in sorted(os.listdir(corpus_dir)):
        if not entry.startswith("vars"):
            continue
        try:
            v, d, n = entry.removeprefix("vars").replace("deg", "").replace(
                "n", ""
            ).split("_")
            cells.append((int(v), int(d), int(n)))
        except ValueError:
            continue
        run_dirs = [
            e for e in os.listdir(os.path.join(corpus_dir, entry)) if e.startswith("run")
        ]
        runs = max(runs, len(run_dirs))
    if not cells:
        return None
    return cells, runs


def _cmd_aggregate(args) -> int:
    payload, records = harness.load_records(args.records)
    means, stds = harness.aggregate(records)
    manifest = harness.manifest_from_records(payload, records)
    os.makedirs(args.out, exist_ok=True)
    out = os.path.join(args.out, "aggregate.json")
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "means": means.rows,
                "stds": stds.rows,
                "manifest": {
                    "algorithms": [
                        {"alg_id": a, "name": n, "params": p}
                        for a, n, p in manifest.algorithms
                    ],
                    "vars": manifest.vars_levels,
                    "deg": manifest.deg_levels,
                    "n": manifest.n_levels,
                    "runs": manifest.runs,
                },
            },
            fh,
            indent=1,
            sort_keys=True,
        )
    print(f"wrote {out}")
    return 0


def _cmd_report(args) -> int:
    agg_path = os.path.join(args.out, "aggregate.json")
    if not os.path.exists(agg_path):
        raise SystemExit(f"{agg_path} not found; run 'causal-bench aggregate' first")
    with open(agg_path, encoding="utf-8") as fh:
        agg = json.load(fh)
    means = dataio.StatsTable(rows=agg["means"])
    stds = dataio.StatsTable(rows=agg["stds"])
    mf = agg["manifest"]
    manifest = dataio.ConfigManifest(
        algorithms=[(a["alg_id"], a["name"], a["params"]) for a in mf["algorithms"]],
        vars_levels=mf["vars"],
        deg_levels=mf["deg"],
        n_levels=mf["n"],
        runs=mf["runs"],
    )
    paths = dataio.write_tables(means, stds, manifest, args.out)
    print("wrote " + ", ".join(sorted(paths.values())))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="causal-bench",
        description="Benchmark PC/FGES variants on simulated linear Gaussian data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate the simulation corpus")
    p_sim.add_argument("--config", help="key-value config file")
    p_sim.add_argument("--out", help="output directory (overrides config)")
    p_sim.set_defaults(fn=_cmd_simulate)

    p_run = sub.add_parser("run", help="run algorithms over a corpus")
    p_run.add_argument("--corpus", required=True)
    p_run.add_argument(
        "--algs",
        required=True,
        help="';'-separated algorithm specs, e.g. 'pc alpha=0.01; fges penalty=2'",
    )
    p_run.add_argument("--timeout", type=float, default=harness.DEFAULT_TIMEOUT_S)
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--out", default="bench-out")
    p_run.add_argument("--config", help=argparse.SUPPRESS)
    p_run.set_defaults(fn=_cmd_run)

    p_agg = sub.add_parser("aggregate", help="aggregate run records")
    p_agg.add_argument("--records", required=True, help="directory with records.json")
    p_agg.add_argument("--out", required=True)
    p_agg.set_defaults(fn=_cmd_aggregate)

    p_rep = sub.add_parser("report", help="emit stats.txt, std.txt, config.txt")
    p_rep.add_argument("--out", required=True, help="directory with aggregate.json")
    p_rep.set_defaults(fn=_cmd_report)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"causal-bench: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
