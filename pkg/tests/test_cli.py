import json

import pytest

from simcomm.cli import build_run_config, main, read_settings


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def bench_files(tmp_path, capsys):
    code, out, _ = run(capsys, "generate", tmp_path / "b", "--nodes", 60, "--m", 2, "--seed", 4)
    assert code == 0
    meta = json.loads(out)
    assert meta["rng_seed"] == 4 and meta["links"] == 3 + 57 * 2
    return tmp_path / "b_edges.txt", tmp_path / "b_communities.txt"


def test_detect_and_metrics(tmp_path, capsys, bench_files):
    edges, comms = bench_files
    code, out, _ = run(capsys, "detect", edges, "--detector", "louvain", "--seed", 3, "--out", tmp_path / "p.txt")
    info = json.loads(out)
    assert code == 0 and info["rng_seed"] == 3 and info["communities"] >= 2
    code, out, _ = run(capsys, "metrics", tmp_path / "p.txt", comms, "--edges", edges)
    info = json.loads(out)
    assert info["nodes"] == 60 and info["nodes_not_shared"] == 0
    assert 0 <= info["nmi"] <= 1 and "q_weighted" in info


def test_pipeline_writes_outputs(tmp_path, capsys, bench_files):
    edges, comms = bench_files
    out_dir = tmp_path / "run"
    code, out, _ = run(
        capsys, "pipeline", "--edges", edges, "--communities", comms, "--mode", "ground_truth",
        "--seeds", "0-1", "--out", out_dir, "--set", "learner.rf_trees=5", "--set", "learner.xgb_rounds=5",
    )
    assert code == 0 and "DT-Leiden" in out
    rec = json.loads((out_dir / "b_edges__ground_truth__DT-Leiden.json").read_text())
    assert rec["seeds"] == [0, 1]
    assert (out_dir / "records.csv").exists()
    assert (out_dir / "artifacts" / "DT-Leiden_seed1_similarity.txt").exists()
    assert (out_dir / "artifacts" / "DT-Leiden_seed0_partition.txt").exists()


def test_grid_then_report(tmp_path, capsys, bench_files):
    edges, comms = bench_files
    ini = tmp_path / "run.ini"
    ini.write_text(
        f"[run]\nedges = {edges}\ncommunities = {comms}\nmode = ground_truth\nseeds = 0\noutput = {tmp_path / 'grid'}\n"
        "[learner]\nrf_trees = 5\nxgb_rounds = 5\n"
    )
    code, out, _ = run(capsys, "grid", "--config", ini)
    assert code == 0 and out.count("\n") == 20
    code, out, _ = run(capsys, "report", tmp_path / "grid", "--out", tmp_path / "rep")
    assert code == 0 and "delta" in out and "note: correlation skipped" in out
    assert (tmp_path / "rep" / "tables.csv").read_text().startswith("dataset,rule,method,metric,value")


def test_settings_and_overrides(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[detector_b]\ndetector = infomap\n[learner]\nlearner = vc\n[sampling]\nmax_second_order = 50\n")
    cfg = build_run_config(read_settings(str(ini)))
    assert cfg.detector_g.detector == "infomap"
    assert cfg.learner_kind == "vc" and cfg.sampling.max_second_order == 50
    assert list(cfg.seeds) == list(range(10))
    bad = tmp_path / "bad.ini"
    bad.write_text("[nonsense]\na = 1\n")
    with pytest.raises(ValueError):
        read_settings(str(bad))


def test_errors_are_reported(tmp_path, capsys):
    code, _, err = run(capsys, "pipeline", "--edges", tmp_path / "missing.txt")
    assert code == 2 and "missing.txt" in err
    code, _, err = run(capsys, "pipeline", "--set", "learner.depth")
    assert code == 2 and "section.key=value" in err
    code, _, err = run(capsys, "grid", "--edges", tmp_path / "x", "--mode", "ground_truth")
    assert code == 2 and "community file" in err
