import json
import os

import numpy as np
import pytest

from simcomm.bench import BenchmarkParams, generate
from simcomm.detect import DetectorConfig
from simcomm.graph import Graph, Partition
from simcomm.learn import LearnerConfig
from simcomm.pipeline import (
    DETECTOR_NAMES,
    GRID_LEARNERS,
    Dataset,
    RunConfig,
    best_record,
    format_name,
    load_dataset,
    load_records,
    parse_name,
    report,
    run_baseline,
    run_grid,
    run_pipeline,
    write_records,
    write_report,
)

FAST = LearnerConfig(rf_trees=10, xgb_rounds=10)


@pytest.fixture(scope="module")
def bench():
    g, t = generate(BenchmarkParams(m=2, n_target=60, rng_seed=4))
    return Dataset("bench", g, t)


@pytest.fixture(scope="module")
def grid(bench):
    return run_grid(bench, "ground_truth", seeds=(0, 1), learner=FAST)


def _strip_time(rec):
    d = rec.to_dict()
    d.pop("seconds")
    return d


def test_names_round_trip():
    for learner in GRID_LEARNERS:
        for det in DETECTOR_NAMES:
            assert parse_name(format_name(learner, det)) == (learner, det)
    assert format_name("rf", "leiden") == "RF-Leiden"
    assert format_name("vc_hard", "fast_greedy") == "VC-FG"
    with pytest.raises(ValueError):
        parse_name("SVM-Leiden")


def test_config_invariants():
    with pytest.raises(ValueError):
        RunConfig("statistical_physics", DetectorConfig("leiden"), DetectorConfig("infomap"))
    cfg = RunConfig("ground_truth", DetectorConfig("leiden"), DetectorConfig("infomap"))
    assert cfg.name == "DT-Infomap" and cfg.selection_metric == "nmi"
    assert RunConfig().selection_metric == "q_weighted"
    with pytest.raises(ValueError):
        RunConfig(mode="supervised")
    with pytest.raises(ValueError):
        RunConfig(seeds=())


def test_perfect_truth_on_disjoint_triangles():
    g = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    ds = Dataset("tri", g, Partition(np.array([0, 0, 0, 1, 1, 1])))
    for rec in run_grid(ds, "ground_truth", seeds=(0,), learner=FAST):
        assert rec.nmi == 1.0 and rec.ari == 1.0


def test_ground_truth_mode_needs_truth(bench):
    with pytest.raises(RuntimeError, match="community file"):
        run_pipeline(Dataset("x", bench.graph), RunConfig("ground_truth", seeds=(0,)))


def test_deterministic_and_means(bench):
    cfg = RunConfig("statistical_physics", learner=FAST, seeds=(0, 1, 2))
    a, b = run_pipeline(bench, cfg), run_pipeline(bench, cfg)
    assert _strip_time(a) == _strip_time(b)
    for key in ("q_weighted", "nmi", "ari"):
        vals = [getattr(r, key) for r in a.per_seed]
        assert abs(getattr(a, key) - float(np.mean(vals))) <= 1e-12
    assert a.name == "DT-Leiden" and a.seeds == [0, 1, 2]


def test_statistical_physics_ignores_truth(bench):
    cfg = RunConfig("statistical_physics", DetectorConfig("louvain"), learner=FAST, seeds=(0,))
    with_truth = run_pipeline(bench, cfg)
    without = run_pipeline(Dataset(bench.name, bench.graph), cfg)
    assert with_truth.q_weighted == without.q_weighted
    assert with_truth.similarity_gap == without.similarity_gap
    assert without.nmi is None and with_truth.nmi is not None


def test_reweighting_raises_weighted_modularity(bench):
    rec = run_pipeline(bench, RunConfig("statistical_physics", learner=FAST, seeds=(0, 1)))
    base = run_baseline(bench, "leiden", (0, 1))
    assert rec.q_weighted > base.q_weighted


def test_vc_keeps_better_rule(bench):
    rec = run_pipeline(bench, RunConfig("ground_truth", learner=FAST, seeds=(0,), learner_kind="vc"))
    soft = run_pipeline(bench, RunConfig("ground_truth", learner=LearnerConfig("vc_soft", rf_trees=10, xgb_rounds=10), seeds=(0,)))
    hard = run_pipeline(bench, RunConfig("ground_truth", learner=LearnerConfig("vc_hard", rf_trees=10, xgb_rounds=10), seeds=(0,)))
    assert rec.name == "VC-Leiden"
    assert rec.nmi == max(soft.nmi, hard.nmi)


def test_grid_shape_and_best(grid):
    assert len(grid) == 20
    assert sum(r.rule == "original" for r in grid) == 4
    names = {r.name for r in grid if r.rule == "ground_truth"}
    assert len(names) == 16
    for metric in ("q_weighted", "nmi", "ari"):
        best = best_record(grid, metric)
        assert all(best.metric(metric) >= r.metric(metric) for r in grid)


def test_grid_cell_matches_single_run(bench, grid):
    cell = next(r for r in grid if r.name == "RF-Infomap")
    cfg = RunConfig("ground_truth", DetectorConfig("infomap"), learner=LearnerConfig("rf", rf_trees=10, xgb_rounds=10), seeds=(0, 1))
    single = run_pipeline(bench, cfg)
    assert single.nmi == cell.nmi and single.q_weighted == cell.q_weighted


def test_grid_records_failures_and_continues(bench):
    tiny = Dataset("tiny", Graph(4, [(0, 1), (2, 3)]), Partition(np.array([0, 0, 1, 1])))
    recs = run_grid(tiny, "ground_truth", seeds=(0,), learner=FAST)
    # two samples cannot fill five folds; baselines still run
    assert all(r.failed for r in recs if r.rule != "original")
    assert all(r.failed is None for r in recs if r.rule == "original")


def test_report_single_record(grid):
    rep = report(grid[:1])
    assert rep.rows and not rep.correlations
    assert any("skipped" in n for n in rep.notices)
    with pytest.raises(ValueError):
        report([])


def test_report_delta(grid):
    rep = report(grid)
    d = next(x for x in rep.deltas if x["rule"] == "ground_truth" and x["metric"] == "nmi")
    assert d["delta_percent"] == pytest.approx(100 * (d["best_proposed"] - d["best_original"]) / d["best_original"])


def test_correlation_perfect_linearity(grid):
    recs = []
    for i in range(5):
        r = next(x for x in grid if x.name == "DT-Leiden")
        clone = type(r)(**{**r.__dict__, "dataset": f"d{i}", "nmi": 0.1 + 0.1 * i, "similarity_gap": 0.3 + 0.2 * i})
        recs.append(clone)
    rep = report(recs)
    c = next(x for x in rep.correlations if x["metric"] == "nmi")
    assert c["r"] == pytest.approx(1.0) and c["n"] == 5


def test_records_round_trip(tmp_path, grid):
    write_records(grid, str(tmp_path))
    files = [os.path.join(tmp_path, f) for f in os.listdir(tmp_path) if f.endswith(".json")]
    back = load_records(sorted(files))
    assert len(back) == 20
    orig = {r.name: r for r in grid}
    for r in back:
        assert r.nmi == orig[r.name].nmi
        assert len(r.per_seed) == len(orig[r.name].per_seed)
    write_report(report(back), str(tmp_path / "rep"))
    with open(tmp_path / "rep" / "report.json") as fh:
        assert "deltas" in json.load(fh)


def test_load_dataset_preprocesses(tmp_path):
    (tmp_path / "e.txt").write_text("1 2\n2 3\n3 1\n3 4\n4 5\n5 6\n6 4\n6 7\n")
    (tmp_path / "c.txt").write_text("1 0\n2 0\n3 0\n4 1\n5 1\n6 1\n7 2\n")
    ds = load_dataset(tmp_path / "e.txt", tmp_path / "c.txt")
    # node 7 is alone in its community and is dropped with its link
    assert ds.graph.node_count == 6 and ds.graph.link_count == 7
    assert ds.truth.community_count == 2
    assert ds.name == "e"
