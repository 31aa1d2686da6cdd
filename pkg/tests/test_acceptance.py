"""Acceptance suite: one test per acceptance criterion, each printing a
PASS line with its measured numbers when it holds (run with -s to see them).
"""

import time

import numpy as np

from causalbench import dataio
from causalbench.fges import FgesConfig, fges_search
from causalbench.graph import MixedGraph, cpdag_of
from causalbench.harness import (
    RunMatrixConfig,
    aggregate,
    generate_corpus,
    parse_algorithms,
    run_matrix,
    run_statistics,
)
from causalbench.indtest import DsepOracleTest, correlation_matrix
from causalbench.metrics import adjacency_confusion, confusion_counts, matthews
from causalbench.pc import (
    ConflictRule,
    SepsetMap,
    make_variant,
    orient_colliders_sepset,
    run_pc,
)
from causalbench.score import DsepOracleScore, SemBicScore
from causalbench.simulate import SimCell, random_dag, simulate_cell
from conftest import sparse_random_dag

MASTER_SEED = 20170803


def _oracle_dags(count=50, vars=10, degree=2, seed=11):
    gen = np.random.default_rng(seed)
    return [random_dag(vars, degree, gen) for _ in range(count)]


def test_oracle_cpdag_recovery():
    """run_pc with the d-separation oracle recovers cpdag_of(truth) exactly
    on 50 random DAGs (10 nodes, degree 2), in under 5 seconds."""
    t0 = time.perf_counter()
    dags = _oracle_dags()
    for dag in dags:
        est = run_pc(make_variant("pc"), test=DsepOracleTest(dag))
        assert est == cpdag_of(dag)
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    print(f"\nACCEPTANCE PASS: oracle CPDAG recovery 50/50 in {elapsed:.2f}s")


def test_fges_equals_pc_under_oracle():
    """fges_search with the +/-1 d-separation score returns the same graph as
    oracle PC on the same 50 DAGs, in under 10 seconds."""
    t0 = time.perf_counter()
    dags = _oracle_dags()
    for dag in dags:
        pc_out = run_pc(make_variant("pc"), test=DsepOracleTest(dag))
        fges_out = fges_search(
            FgesConfig(score=DsepOracleScore(dag), faithfulness_assumed=False)
        )
        assert fges_out == pc_out
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    print(f"ACCEPTANCE PASS: FGES == PC under oracle 50/50 in {elapsed:.2f}s")


def test_appendix_row_reproduction():
    """Cell (50 vars, deg 2, n=1000), 10 fresh-seed runs: PC priority
    alpha=0.01 lands within +/-0.05 of AP 0.96 and AR 0.97; FGES SEM-BIC c=2
    faithfulness=false within +/-0.05 of AP 0.97 / AR 0.99 and +/-0.07 of
    AHP 0.92. Under 2 minutes."""
    t0 = time.perf_counter()
    pc_rows, fges_rows = [], []
    for run in range(10):
        dag, _, data, _ = simulate_cell(MASTER_SEED, SimCell(50, 2, 1000, run))
        pc_rows.append(run_statistics(dag, run_pc(make_variant("pc", alpha=0.01), data), 0.0))
        corr = correlation_matrix(data)
        est = fges_search(
            FgesConfig(score=SemBicScore(corr, penalty=2.0), faithfulness_assumed=False),
            names=list(data.names),
        )
        fges_rows.append(run_statistics(dag, est, 0.0))

    def mean(rows, k):
        return float(np.mean([r[k] for r in rows if r[k] is not None]))

    pc_ap, pc_ar = mean(pc_rows, "AP"), mean(pc_rows, "AR")
    fg_ap, fg_ar, fg_ahp = (
        mean(fges_rows, "AP"),
        mean(fges_rows, "AR"),
        mean(fges_rows, "AHP"),
    )
    elapsed = time.perf_counter() - t0
    assert abs(pc_ap - 0.96) <= 0.05, pc_ap
    assert abs(pc_ar - 0.97) <= 0.05, pc_ar
    assert abs(fg_ap - 0.97) <= 0.05, fg_ap
    assert abs(fg_ar - 0.99) <= 0.05, fg_ar
    assert abs(fg_ahp - 0.92) <= 0.07, fg_ahp
    assert elapsed < 120.0
    print(
        f"ACCEPTANCE PASS: appendix rows, PC AP={pc_ap:.3f} AR={pc_ar:.3f}; "
        f"FGES AP={fg_ap:.3f} AR={fg_ar:.3f} AHP={fg_ahp:.3f} in {elapsed:.1f}s"
    )


def test_identical_adjacency_statistics():
    """On 10 datasets from cell (50, 4, 500), the sepset, conservative, and
    max-p variants with equal alpha and stable flag produce identical
    ATP/AFP/AFN. Under 1 minute."""
    t0 = time.perf_counter()
    for run in range(10):
        dag, _, data, _ = simulate_cell(MASTER_SEED, SimCell(50, 4, 500, run))
        counts = []
        for name in ("pc-stable", "cpc-stable", "pc-stable-max"):
            est = run_pc(make_variant(name, alpha=0.01), data)
            tp, fp, fn, _ = adjacency_confusion(dag, est)
            counts.append((tp, fp, fn))
        assert counts[0] == counts[1] == counts[2], counts
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    print(f"ACCEPTANCE PASS: identical adjacency statistics in {elapsed:.1f}s")


def test_order_independence():
    """PC-Stable adjacency sets are identical under 10 random column
    permutations per dataset (10 datasets, 20 nodes); PC-Stable-Max
    additionally returns identical orientations."""
    from causalbench.simulate import draw_params, shuffle_columns, simulate_recursive

    gen = np.random.default_rng(23)
    for _ in range(10):
        dag = random_dag(20, 4, gen)
        data = simulate_recursive(draw_params(dag, gen), 400, gen)
        base_skel = base_maxp = None
        for _ in range(10):
            shuffled, _ = shuffle_columns(data, gen)
            stable = run_pc(make_variant("pc-stable", alpha=0.01), shuffled)
            maxp = run_pc(make_variant("pc-stable-max", alpha=0.01), shuffled)
            if base_skel is None:
                base_skel = stable.skeleton()
                base_maxp = maxp
            assert stable.skeleton() == base_skel
            assert maxp == base_maxp
    print("ACCEPTANCE PASS: order independence (adjacencies and max-p orientations)")


def test_conflict_rule_trace():
    """The four-node collider-conflict scenario yields exactly the three
    documented graphs under the priority, overwrite, and bidirected rules."""
    def scenario():
        skel = MixedGraph(["X", "Y", "Z", "W"])
        skel.add_undirected(0, 1)
        skel.add_undirected(1, 2)
        skel.add_undirected(2, 3)
        sepsets = SepsetMap()
        sepsets.record(0, 2, ())  # omits Y
        sepsets.record(1, 3, ())  # omits Z
        return skel, sepsets

    skel, sepsets = scenario()
    out = orient_colliders_sepset(skel, sepsets, ConflictRule.PRIORITY)
    assert out.has_directed(0, 1) and out.has_directed(2, 1) and out.has_undirected(2, 3)

    out = orient_colliders_sepset(skel, sepsets, ConflictRule.OVERWRITE)
    assert out.has_directed(0, 1) and out.has_directed(1, 2) and out.has_directed(3, 2)

    out = orient_colliders_sepset(skel, sepsets, ConflictRule.BIDIRECTED)
    assert out.has_directed(0, 1) and out.has_bidirected(1, 2) and out.has_directed(3, 2)
    print("ACCEPTANCE PASS: conflict-rule trace (priority / overwrite / bidirected)")


def test_metrics_against_enumeration():
    """Confusion counts match exhaustive pair enumeration on 500 sampled
    4-node graph pairs; Matthews correlations stay within [-1, 1]."""
    from test_metrics import brute_force_confusion, random_mixed_graph

    gen = np.random.default_rng(41)
    for _ in range(500):
        truth = sparse_random_dag(gen, 4, 0.5)
        while truth.num_edges > 4:
            truth = sparse_random_dag(gen, 4, 0.5)
        est = random_mixed_graph(gen, 4, 4)
        c = confusion_counts(truth, est)
        adj, arrow = brute_force_confusion(truth, est)
        assert (c.atp, c.afp, c.afn, c.atn) == adj
        assert (c.ahtp, c.ahfp, c.ahfn, c.ahtn) == arrow
        assert -1.0 <= matthews(c, "adj") <= 1.0
        assert -1.0 <= matthews(c, "arrow") <= 1.0
    print("ACCEPTANCE PASS: metrics match enumeration on 500 graph pairs")


def test_simulation_moments():
    """Analytic covariance (I-B)^-T Omega (I-B)^-1 matches the sample
    covariance entrywise within 5 standard errors at n = 100000, for 10
    random 10-node models."""
    from causalbench.simulate import draw_params, simulate_recursive

    gen = np.random.default_rng(29)
    n = 100_000
    for _ in range(10):
        dag = random_dag(10, 2, gen)
        model = draw_params(dag, gen)
        data = simulate_recursive(model, n, gen)
        sample = np.cov(data.values, rowvar=False)
        sigma = model.analytic_covariance()
        for i in range(10):
            for j in range(i, 10):
                se = np.sqrt((sigma[i, i] * sigma[j, j] + sigma[i, j] ** 2) / n)
                assert abs(sample[i, j] - sigma[i, j]) < 5 * se
    print("ACCEPTANCE PASS: simulation moments within 5 standard errors")


def _mini_pipeline(outdir: str) -> tuple[bytes, bytes]:
    cfg = RunMatrixConfig(
        cells=[(20, 2, 200)],
        runs=3,
        algorithms=parse_algorithms("pc alpha=0.01; fges score=sem-bic penalty=2"),
        timeout_s=300.0,
        master_seed=MASTER_SEED,
        output_dir=outdir,
    )
    corpus = generate_corpus(cfg)
    records = run_matrix(cfg, corpus, workers=1)
    means, stds = aggregate(records)
    from causalbench.dataio import ConfigManifest, write_tables

    manifest = ConfigManifest(
        algorithms=[(s.alg_id, s.name, s.param_map) for s in cfg.algorithms],
        vars_levels=[20],
        deg_levels=[2],
        n_levels=[200],
        runs=3,
    )
    paths = write_tables(means, stds, manifest, outdir)

    def masked(path):
        lines = open(path, "rb").read().split(b"\n")
        out = [lines[0]]
        for line in lines[1:]:
            if line:
                out.append(b"\t".join(line.split(b"\t")[:-1] + [b"E"]))
        return b"\n".join(out)

    return masked(paths["stats"]), masked(paths["std"])


def test_end_to_end_determinism(tmp_path):
    """Two executions of the mini pipeline (1 cell, 2 algorithms, 3 runs,
    fixed seed, workers=1) produce byte-identical stats.txt and std.txt once
    the timing column is masked."""
    a = _mini_pipeline(str(tmp_path / "a"))
    b = _mini_pipeline(str(tmp_path / "b"))
    assert a[0] == b[0]
    assert a[1] == b[1]
    print("ACCEPTANCE PASS: end-to-end determinism (stats/std byte-identical, E masked)")


def test_fges_scaling_smoke():
    """FGES SEM-BIC c=4, faithfulness assumed, completes one run of cell
    (500 vars, deg 6, n=1000) within the 600-second timeout bound."""
    dag, _, data, _ = simulate_cell(MASTER_SEED, SimCell(500, 6, 1000, 0))
    corr = correlation_matrix(data)
    t0 = time.perf_counter()
    est = fges_search(
        FgesConfig(score=SemBicScore(corr, penalty=4.0), faithfulness_assumed=True),
        names=list(data.names),
    )
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0
    stats = run_statistics(dag, est, elapsed)
    print(
        f"ACCEPTANCE PASS: 500-var FGES smoke in {elapsed:.1f}s "
        f"(AP={stats['AP']:.2f} AR={stats['AR']:.2f})"
    )
