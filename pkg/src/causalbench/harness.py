"""Benchmark orchestration: corpus generation, the (algorithm x cell x run)
matrix with per-run timeouts, and aggregation into the result tables.

Each run executes in its own worker process, which writes the estimated graph
and the elapsed time (measured around the search call only, on a monotonic
clock) beside the corpus. Runs that outlive the timeout are terminated and
recorded as TIMEOUT; failures become ERROR records and never abort the matrix.
Statistics are averaged over the runs that completed, with the sentinels '-'
(no completed run) and '*' (undefined in every completed run).
"""

from __future__ import annotations

import json
import multiprocessing
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import dataio
from .dataio import MISSING, STAT_NAMES, ConfigManifest, StatsTable
from .fges import FgesConfig, fges_search
from .graph import ARROW, TAIL, Dag, MixedGraph
from .indtest import correlation_matrix
from .metrics import confusion_counts, matthews, precision_recall
from .pc import VARIANT_NAMES, make_variant, run_pc
from .score import FisherZScore, SemBicScore
from .simulate import (
    DEGREE_LEVELS,
    RUNS_PER_CELL,
    SAMPLE_LEVELS,
    VARS_LEVELS,
    SimCell,
    simulate_cell,
)

DEFAULT_TIMEOUT_S = 600.0
DEFAULT_MASTER_SEED = 20170803
SEED_ENV_VAR = "CAUSAL_BENCH_SEED"


@dataclass(frozen=True)
class AlgorithmSpec:
    alg_id: int
    name: str
    params: tuple[tuple[str, str], ...]

    @property
    def param_map(self) -> dict[str, str]:
        return dict(self.params)

    @property
    def label(self) -> str:
        bits = [self.name] + [f"{k}={v}" for k, v in self.params]
        return " ".join(bits)


def parse_algorithms(spec: str) -> list[AlgorithmSpec]:
    """Parse 'pc alpha=0.01; fges score=sem-bic penalty=2' into specs.

    Algorithms are separated by ';'; within one, whitespace-separated
    key=value options follow the variant name. Ids are assigned in order,
    starting at 1.
    """
    specs = []
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split()
        name, options = parts[0], parts[1:]
        params = {}
        for opt in options:
            if "=" not in opt:
                raise ValueError(f"malformed option {opt!r} in {chunk!r}")
            k, v = opt.split("=", 1)
            params[k] = v
        specs.append(
            AlgorithmSpec(len(specs) + 1, name, tuple(sorted(params.items())))
        )
    if not specs:
        raise ValueError("no algorithms given")
    for s in specs:
        build_runner(s)  # validate early
    return specs


def build_runner(spec: AlgorithmSpec):
    """Callable mapping a DataSet to an estimated pattern."""
    params = spec.param_map
    if spec.name in VARIANT_NAMES:
        variant = make_variant(
            spec.name,
            alpha=float(params.get("alpha", 0.01)),
            conflict=params.get("conflict", "priority"),
        )
        workers = int(params.get("workers", 1))
        return lambda data: run_pc(variant, data, workers=workers)
    if spec.name == "fges":
        kind = params.get("score", "sem-bic")
        if kind not in ("sem-bic", "fisher-z"):
            raise ValueError(f"unknown fges score {kind!r}")
        penalty = float(params.get("penalty", 2.0))
        alpha = float(params.get("alpha", 1e-3))
        faithfulness = params.get("faithfulness", "false").lower() == "true"
        workers = int(params.get("workers", 1))

        def runner(data):
            corr = correlation_matrix(data)
            if kind == "sem-bic":
                score = SemBicScore(corr, penalty=penalty)
            else:
                score = FisherZScore(corr, alpha=alpha)
            cfg = FgesConfig(
                score=score, faithfulness_assumed=faithfulness, workers=workers
            )
            return fges_search(cfg, names=list(data.names))

        return runner
    raise ValueError(f"unknown algorithm {spec.name!r}")


@dataclass
class RunMatrixConfig:
    cells: list[tuple[int, int, int]] = field(
        default_factory=lambda: [
            (v, d, n) for v in VARS_LEVELS for d in DEGREE_LEVELS for n in SAMPLE_LEVELS
        ]
    )
    runs: int = RUNS_PER_CELL
    algorithms: list[AlgorithmSpec] = field(default_factory=list)
    timeout_s: float = DEFAULT_TIMEOUT_S
    master_seed: int = DEFAULT_MASTER_SEED
    output_dir: str = "bench-out"


@dataclass
class RunRecord:
    alg_id: int
    vars: int
    deg: int
    n: int
    run: int
    graph_path: str
    truth_path: str
    elapsed_s: float
    status: str  # OK | TIMEOUT | ERROR

    def key(self):
        return (self.alg_id, self.vars, self.deg, self.n, self.run)


def cell_dir(corpus_dir: str, vars: int, deg: int, n: int, run: int) -> str:
    return os.path.join(corpus_dir, f"vars{vars}_deg{deg}_n{n}", f"run{run}")


def generate_corpus(config: RunMatrixConfig) -> str:
    """Simulate every (cell, run) dataset + true graph under output_dir/corpus."""
    corpus = os.path.join(config.output_dir, "corpus")
    for vars_, deg, n in config.cells:
        for run in range(config.runs):
            out = cell_dir(corpus, vars_, deg, n, run)
            os.makedirs(out, exist_ok=True)
            dag, _, data, _ = simulate_cell(
                config.master_seed, SimCell(vars_, deg, n, run)
            )
            dataio.write_dataset(data, os.path.join(out, "data.txt"))
            dataio.write_graph(dag, os.path.join(out, "graph.txt"))
    return corpus


def _run_job(payload: dict) -> None:
    """Worker entry: load data, run the algorithm, store graph and timing."""
    try:
        spec = AlgorithmSpec(
            payload["alg_id"], payload["name"], tuple(map(tuple, payload["params"]))
        )
        runner = build_runner(spec)
        data = dataio.read_dataset(payload["data_path"])
        t0 = time.perf_counter()
        est = runner(data)
        elapsed = time.perf_counter() - t0
        dataio.write_graph(est, os.path.join(payload["out_dir"], "graph.txt"))
        with open(os.path.join(payload["out_dir"], "elapsed.txt"), "w") as fh:
            fh.write(f"{elapsed!r}\n")
    except Exception as exc:  # recorded, never propagated into the matrix
        with open(os.path.join(payload["out_dir"], "error.txt"), "w") as fh:
            fh.write(f"{type(exc).__name__}: {exc}\n")
        raise SystemExit(1)


def run_matrix(
    config: RunMatrixConfig, corpus_dir: str, workers: int = 1
) -> list[RunRecord]:
    """Execute every (algorithm, cell, run) job with timeout enforcement."""
    jobs = []
    for spec in config.algorithms:
        for vars_, deg, n in config.cells:
            for run in range(config.runs):
                src = cell_dir(corpus_dir, vars_, deg, n, run)
                out = os.path.join(
                    config.output_dir,
                    "results",
                    f"alg{spec.alg_id}",
                    f"vars{vars_}_deg{deg}_n{n}",
                    f"run{run}",
                )
                jobs.append(
                    {
                        "alg_id": spec.alg_id,
                        "name": spec.name,
                        "params": [list(kv) for kv in spec.params],
                        "vars": vars_,
                        "deg": deg,
                        "n": n,
                        "run": run,
                        "data_path": os.path.join(src, "data.txt"),
                        "truth_path": os.path.join(src, "graph.txt"),
                        "out_dir": out,
                    }
                )

    ctx = multiprocessing.get_context("spawn")
    records: list[RunRecord] = []
    active: list[tuple] = []
    pending = list(jobs)
    while pending or active:
        while len(active) < workers and pending:
            job = pending.pop(0)
            os.makedirs(job["out_dir"], exist_ok=True)
            proc = ctx.Process(target=_run_job, args=(job,), daemon=True)
            proc.start()
            active.append((proc, job, time.monotonic()))
        time.sleep(0.005)
        still = []
        for proc, job, t0 in active:
            if not proc.is_alive():
                proc.join()
                records.append(_collect_record(job, proc.exitcode))
            elif time.monotonic() - t0 > config.timeout_s:
                proc.terminate()
                proc.join()
                records.append(_make_record(job, config.timeout_s, "TIMEOUT"))
            else:
                still.append((proc, job, t0))
        active = still

    records.sort(key=RunRecord.key)
    _save_records(config, records)
    return records


def _make_record(job, elapsed, status) -> RunRecord:
    return RunRecord(
        alg_id=job["alg_id"],
        vars=job["vars"],
        deg=job["deg"],
        n=job["n"],
        run=job["run"],
        graph_path=os.path.join(job["out_dir"], "graph.txt"),
        truth_path=job["truth_path"],
        elapsed_s=elapsed,
        status=status,
    )


def _collect_record(job, exitcode) -> RunRecord:
    elapsed_path = os.path.join(job["out_dir"], "elapsed.txt")
    if exitcode == 0 and os.path.exists(elapsed_path):
        with open(elapsed_path) as fh:
            elapsed = float(fh.read().strip())
        return _make_record(job, elapsed, "OK")
    return _make_record(job, 0.0, "ERROR")


def _save_records(config: RunMatrixConfig, records: list[RunRecord]) -> None:
    payload = {
        "runs": config.runs,
        "algorithms": [
            {"alg_id": s.alg_id, "name": s.name, "params": dict(s.params)}
            for s in config.algorithms
        ],
        "records": [asdict(r) for r in records],
    }
    path = os.path.join(config.output_dir, "records.json")
    os.makedirs(config.output_dir, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)


def load_records(records_dir: str) -> tuple[dict, list[RunRecord]]:
    with open(os.path.join(records_dir, "records.json"), encoding="utf-8") as fh:
        payload = json.load(fh)
    records = [RunRecord(**r) for r in payload["records"]]
    return payload, records


def _as_dag(g: MixedGraph) -> Dag:
    dag = Dag(g.names)
    for i, j, mi, mj in g.edges():
        if mi is TAIL and mj is ARROW:
            dag.add_directed(i, j)
        elif mi is ARROW and mj is TAIL:
            dag.add_directed(j, i)
        else:
            raise ValueError("true graph file must contain only directed edges")
    return dag


def run_statistics(truth: Dag, est: MixedGraph, elapsed_s: float) -> dict:
    counts = confusion_counts(truth, est)
    ap, ar, ahp, ahr = precision_recall(counts)
    return {
        "AP": ap,
        "AR": ar,
        "AHP": ahp,
        "AHR": ahr,
        "McAdj": matthews(counts, "adj"),
        "McArrow": matthews(counts, "arrow"),
        "E": elapsed_s,
    }


def aggregate(records: list[RunRecord]) -> tuple[StatsTable, StatsTable]:
    """Mean and sample standard deviation per (algorithm, cell) over the runs
    that completed; '-' when none completed, '*' when a ratio was undefined in
    every completed run. A single completed run reports std 0."""
    groups: dict[tuple, list[RunRecord]] = {}
    for rec in records:
        groups.setdefault((rec.alg_id, rec.vars, rec.deg, rec.n), []).append(rec)

    means, stds = StatsTable(), StatsTable()
    for key in sorted(groups):
        alg_id, vars_, deg, n = key
        per_stat: dict[str, list[float]] = {name: [] for name in STAT_NAMES}
        for rec in sorted(groups[key], key=RunRecord.key):
            if rec.status != "OK":
                continue
            if not os.path.exists(rec.graph_path):
                raise FileNotFoundError(
                    f"missing graph for completed run: {rec.graph_path}"
                )
            truth = _as_dag(dataio.read_graph(rec.truth_path))
            est = dataio.read_graph(rec.graph_path)
            stats = run_statistics(truth, est, rec.elapsed_s)
            for name in STAT_NAMES:
                if stats[name] is not None:
                    per_stat[name].append(stats[name])
        any_ok = any(rec.status == "OK" for rec in groups[key])
        mean_row, std_row = {}, {}
        for name in STAT_NAMES:
            values = per_stat[name]
            if not any_ok:
                mean_row[name] = MISSING
                std_row[name] = MISSING
            elif not values:
                mean_row[name] = None  # undefined in every completed run
                std_row[name] = None
            else:
                mean_row[name] = float(np.mean(values))
                std_row[name] = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
        means.add(alg_id, vars_, deg, n, mean_row)
        stds.add(alg_id, vars_, deg, n, std_row)
    means.sort()
    stds.sort()
    return means, stds


def manifest_from_records(payload: dict, records: list[RunRecord]) -> ConfigManifest:
    return ConfigManifest(
        algorithms=[
            (a["alg_id"], a["name"], dict(a["params"]))
            for a in payload["algorithms"]
        ],
        vars_levels=sorted({r.vars for r in records}),
        deg_levels=sorted({r.deg for r in records}),
        n_levels=sorted({r.n for r in records}),
        runs=payload["runs"],
    )
