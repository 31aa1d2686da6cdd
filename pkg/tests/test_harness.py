import hashlib
import os

import numpy as np
import pytest

from causalbench import dataio
from causalbench.cli import main as cli_main
from causalbench.dataio import MISSING, UNDEFINED
from causalbench.graph import Dag, MixedGraph
from causalbench.harness import (
    AlgorithmSpec,
    RunMatrixConfig,
    RunRecord,
    aggregate,
    build_runner,
    cell_dir,
    generate_corpus,
    load_records,
    manifest_from_records,
    parse_algorithms,
    run_matrix,
    run_statistics,
)


def tree_checksum(root):
    digest = hashlib.sha256()
    for dirpath, dirnames, filenames in sorted(os.walk(root)):
        dirnames.sort()
        for name in sorted(filenames):
            digest.update(name.encode())
            with open(os.path.join(dirpath, name), "rb") as fh:
                digest.update(fh.read())
    return digest.hexdigest()


class TestParseAlgorithms:
    def test_two_specs(self):
        specs = parse_algorithms("pc alpha=0.01; fges score=sem-bic penalty=2")
        assert [s.alg_id for s in specs] == [1, 2]
        assert specs[0].name == "pc"
        assert specs[1].param_map["penalty"] == "2"
        assert specs[0].label == "pc alpha=0.01"

    def test_unknown_algorithm_rejected(self):
        with pytest.raises(ValueError):
            parse_algorithms("magic-search alpha=0.5")

    def test_malformed_option_rejected(self):
        with pytest.raises(ValueError):
            parse_algorithms("pc alpha")

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            parse_algorithms(" ; ")

    def test_runner_shapes(self):
        for spec_str in (
            "pc alpha=0.01 conflict=overwrite",
            "cpc-stable alpha=0.001",
            "fges score=fisher-z alpha=0.001 faithfulness=true",
        ):
            runner = build_runner(parse_algorithms(spec_str)[0])
            assert callable(runner)


def tiny_config(tmp_path, cells=((12, 2, 120),), runs=2, seed=5):
    return RunMatrixConfig(
        cells=list(cells),
        runs=runs,
        algorithms=[],
        timeout_s=120.0,
        master_seed=seed,
        output_dir=str(tmp_path),
    )


def test_default_grid_is_27_cells_10_runs():
    cfg = RunMatrixConfig()
    assert len(cfg.cells) == 27
    assert cfg.runs == 10
    assert len(cfg.cells) * cfg.runs == 270  # dataset/graph pairs
    assert cfg.timeout_s == 600.0


class TestGenerateCorpus:
    def test_layout_and_count(self, tmp_path):
        cfg = tiny_config(tmp_path)
        corpus = generate_corpus(cfg)
        for run in range(2):
            d = cell_dir(corpus, 12, 2, 120, run)
            assert os.path.exists(os.path.join(d, "data.txt"))
            assert os.path.exists(os.path.join(d, "graph.txt"))

    def test_regeneration_is_byte_identical(self, tmp_path):
        cfg1 = tiny_config(tmp_path / "a")
        cfg2 = tiny_config(tmp_path / "b")
        sum1 = tree_checksum(generate_corpus(cfg1))
        sum2 = tree_checksum(generate_corpus(cfg2))
        assert sum1 == sum2

    def test_different_seed_differs(self, tmp_path):
        sum1 = tree_checksum(generate_corpus(tiny_config(tmp_path / "a", seed=5)))
        sum2 = tree_checksum(generate_corpus(tiny_config(tmp_path / "b", seed=6)))
        assert sum1 != sum2

    def test_true_graph_readable_and_directed(self, tmp_path):
        cfg = tiny_config(tmp_path)
        corpus = generate_corpus(cfg)
        g = dataio.read_graph(os.path.join(cell_dir(corpus, 12, 2, 120, 0), "graph.txt"))
        assert g.num_edges == 12  # vars * degree / 2
        from causalbench.harness import _as_dag

        _as_dag(g)  # raises if not fully directed


class TestRunMatrix:
    def test_tiny_matrix_all_ok(self, tmp_path):
        cfg = tiny_config(tmp_path)
        corpus = generate_corpus(cfg)
        cfg.algorithms = parse_algorithms("pc alpha=0.01; fges penalty=2")
        records = run_matrix(cfg, corpus, workers=2)
        assert len(records) == 2 * 1 * 2  # algs x cells x runs
        assert all(r.status == "OK" for r in records)
        for r in records:
            assert os.path.exists(r.graph_path)
            assert r.elapsed_s > 0
        payload, loaded = load_records(str(tmp_path))
        assert [r.key() for r in loaded] == [r.key() for r in records]

    def test_forced_timeout(self, tmp_path):
        cfg = tiny_config(tmp_path)
        corpus = generate_corpus(cfg)
        cfg.algorithms = parse_algorithms("pc alpha=0.01")
        cfg.timeout_s = 0.001
        records = run_matrix(cfg, corpus, workers=1)
        assert all(r.status == "TIMEOUT" for r in records)
        means, stds = aggregate(records)
        assert all(means.rows[0][k] == MISSING for k in ("AP", "AR", "E"))

    def test_error_recorded_not_raised(self, tmp_path):
        cfg = tiny_config(tmp_path)
        corpus = generate_corpus(cfg)
        cfg.algorithms = [AlgorithmSpec(1, "pc", (("alpha", "not-a-number"),))]
        records = run_matrix(cfg, corpus, workers=1)
        assert all(r.status == "ERROR" for r in records)


class TestAggregate:
    def make_record(self, tmp_path, tag, truth, est, elapsed, run, status="OK"):
        d = tmp_path / tag
        d.mkdir(parents=True, exist_ok=True)
        truth_path = str(d / "truth.txt")
        graph_path = str(d / "est.txt")
        dataio.write_graph(truth, truth_path)
        if status == "OK":
            dataio.write_graph(est, graph_path)
        return RunRecord(
            alg_id=1,
            vars=3,
            deg=2,
            n=100,
            run=run,
            graph_path=graph_path,
            truth_path=truth_path,
            elapsed_s=elapsed,
            status=status,
        )

    def test_single_run_std_zero(self, tmp_path):
        truth = Dag(["X1", "X2", "X3"], [(0, 1), (1, 2)])
        rec = self.make_record(tmp_path, "r0", truth, truth.skeleton(), 0.5, 0)
        means, stds = aggregate([rec])
        assert means.rows[0]["AP"] == 1.0
        assert stds.rows[0]["AP"] == 0.0

    def test_mean_of_two_runs(self, tmp_path):
        truth = Dag(["X1", "X2", "X3"], [(0, 1), (1, 2)])
        perfect = truth.skeleton()
        # estimate with one extra edge: AP = 2/3
        extra = truth.skeleton()
        extra.add_undirected(0, 2)
        r0 = self.make_record(tmp_path, "r0", truth, perfect, 1.0, 0)
        r1 = self.make_record(tmp_path, "r1", truth, extra, 3.0, 1)
        means, stds = aggregate([r0, r1])
        row = means.rows[0]
        assert row["AP"] == pytest.approx((1.0 + 2 / 3) / 2)
        assert row["AR"] == 1.0
        assert row["E"] == pytest.approx(2.0)
        # hand-computed sample standard deviation
        assert stds.rows[0]["AP"] == pytest.approx(np.std([1.0, 2 / 3], ddof=1))

    def test_undefined_in_all_runs_renders_star(self, tmp_path):
        truth = Dag(["X1", "X2", "X3"], [(0, 1), (1, 2)])
        est = truth.skeleton()  # no arrowheads: AHP undefined
        rec = self.make_record(tmp_path, "r0", truth, est, 0.1, 0)
        means, _ = aggregate([rec])
        assert means.rows[0]["AHP"] == UNDEFINED
        assert means.rows[0]["AHR"] == 0.0

    def test_undefined_averaged_over_defined_runs_only(self, tmp_path):
        truth = Dag(["X1", "X2", "X3"], [(0, 1), (1, 2)])
        est_skel = truth.skeleton()
        directed = MixedGraph(truth.names)
        directed.add_directed(0, 1)
        directed.add_directed(1, 2)
        r0 = self.make_record(tmp_path, "r0", truth, est_skel, 0.1, 0)
        r1 = self.make_record(tmp_path, "r1", truth, directed, 0.1, 1)
        means, _ = aggregate([r0, r1])
        assert means.rows[0]["AHP"] == 1.0  # only the defined run counts

    def test_missing_graph_for_ok_record_raises(self, tmp_path):
        truth = Dag(["X1", "X2"], [(0, 1)])
        rec = self.make_record(tmp_path, "r0", truth, truth, 0.1, 0)
        os.remove(rec.graph_path)
        with pytest.raises(FileNotFoundError):
            aggregate([rec])

    def test_matches_spreadsheet_style_recomputation(self, tmp_path):
        truth = Dag(["X1", "X2", "X3"], [(0, 1), (2, 1)])
        est = MixedGraph(truth.names)
        est.add_directed(0, 1)
        est.add_undirected(1, 2)
        stats = run_statistics(truth, est, 0.25)
        # by hand: adjacencies tp=2 fp=0 fn=0; arrows tp=1 fp=0 fn=1
        assert stats["AP"] == 1.0 and stats["AR"] == 1.0
        assert stats["AHP"] == 1.0 and stats["AHR"] == 0.5
        mcc_adj = (2 * 1 - 0) / np.sqrt((2 + 0) * (2 + 0) * (1 + 0) * (1 + 0))
        assert stats["McAdj"] == pytest.approx(mcc_adj)


class TestCli:
    def test_full_pipeline(self, tmp_path):
        cfg_file = tmp_path / "bench.cfg"
        out = tmp_path / "out"
        cfg_file.write_text(
            "# tiny benchmark\n"
            "master_seed = 31\n"
            "vars = 12\n"
            "deg = 2\n"
            "n = 120\n"
            "runs = 2\n"
            f"out = {out}\n"
        )
        assert cli_main(["simulate", "--config", str(cfg_file)]) == 0
        assert (
            cli_main(
                [
                    "run",
                    "--corpus",
                    str(out / "corpus"),
                    "--algs",
                    "pc alpha=0.01",
                    "--timeout",
                    "120",
                    "--workers",
                    "1",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        assert cli_main(["aggregate", "--records", str(out), "--out", str(out)]) == 0
        assert cli_main(["report", "--out", str(out)]) == 0
        stats = dataio.read_stats_table(str(out / "stats.txt"))
        assert len(stats.rows) == 1
        config = dataio.read_config(str(out / "config.txt"))
        assert config.runs == 2
        assert config.algorithms[0][1] == "pc"

    def test_seed_env_override(self, tmp_path, monkeypatch):
        cfg_file = tmp_path / "bench.cfg"
        cfg_file.write_text("master_seed = 31\nvars = 10\ndeg = 2\nn = 60\nruns = 1\n")
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        cli_main(["simulate", "--config", str(cfg_file), "--out", str(out_a)])
        monkeypatch.setenv("CAUSAL_BENCH_SEED", "77")
        cli_main(["simulate", "--config", str(cfg_file), "--out", str(out_b)])
        assert tree_checksum(out_a / "corpus") != tree_checksum(out_b / "corpus")
