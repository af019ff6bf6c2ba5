import json
import subprocess
import sys

import pytest

from tgem.cli import main
from tgem.events import read_events
from tgem.model import read_model

FIVE_NODES = "tests/fixtures/five_node_model.json"


@pytest.fixture(autouse=True)
def _root(monkeypatch, request):
    monkeypatch.chdir(request.config.rootpath)


def test_generate_sample_learn_score_distance(tmp_path, capsys):
    model = tmp_path / "m.json"
    data = tmp_path / "d.csv"
    learned = tmp_path / "l.json"
    trace = tmp_path / "t.json"
    assert main(["generate", "--nodes", "4", "--density", "0.3", "--seed", "7", "--out", str(model)]) == 0
    assert main(["sample", "--model", str(model), "--t-end", "800", "--seed", "1", "--out", str(data)]) == 0
    assert read_events(data).t_star == 800
    assert main(["learn", "--data", str(data), "--max-indegree", "2", "--max-intervals", "4",
                 "--out", str(learned), "--trace", str(trace)]) == 0
    assert read_model(learned).rates
    assert set(json.loads(trace.read_text())["initial_bic"]) == {"forward", "backward"}
    capsys.readouterr()

    assert main(["score", "--model", str(learned), "--data", str(data)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["bic"] == pytest.approx(out["loglik"] - out["penalty"])

    assert main(["score", "--model", str(learned), "--data", str(data), "--verbose"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert sum(c["d"] for c in out["nodes"]["0"]) == pytest.approx(800)

    assert main(["distance", "--a", str(model), "--b", str(model)]) == 0
    assert json.loads(capsys.readouterr().out)["distance"] == 0


def test_learn_quantile(tmp_path):
    data = tmp_path / "d.csv"
    main(["sample", "--model", FIVE_NODES, "--t-end", "300", "--seed", "2", "--out", str(data)])
    out = tmp_path / "l.json"
    assert main(["learn", "--data", str(data), "--heuristic", "quantile", "--q", "0.75", "--out", str(out)]) == 0


def test_distance_set_mode(tmp_path, capsys):
    a = tmp_path / "a.json"
    main(["generate", "--nodes", "5", "--density", "0.4", "--seed", "1", "--out", str(a)])
    capsys.readouterr()
    main(["distance", "--a", str(a), "--b", FIVE_NODES, "--mode", "set"])
    out = json.loads(capsys.readouterr().out)
    assert out["mode"] == "set" and out["distance"] > 0
    assert all(e["in_a"] or e["in_b"] for e in out["edges"])


def test_benchmark_and_report(tmp_path, capsys):
    cfg = tmp_path / "b.toml"
    cfg.write_text(
        "nodes = [3]\ndensities = [0.3]\ntime_units = [100.0]\n"
        'heuristics = ["proximal", "q=0.25"]\nreplicates = 2\n'
    )
    res = tmp_path / "res"
    assert main(["benchmark", "--config", str(cfg), "--out", str(res), "--per-edge"]) == 0
    assert (res / "edges.csv").exists()
    assert main(["report", "--results", str(res), "--out", str(tmp_path / "rep")]) == 0
    text = capsys.readouterr().out
    assert "proximal" in text and "Avg. Median" in text


def test_module_entry_point_and_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("time,label\n2,A\n1,B\n")
    proc = subprocess.run(
        [sys.executable, "-m", "tgem.cli", "learn", "--data", str(bad), "--out", str(tmp_path / "x.json")],
        capture_output=True, text=True,
    )
    assert proc.returncode != 0
    assert "non-increasing timestamps at line 3" in proc.stderr


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])
