"""Command-line behavior: exit codes, outputs, determinism."""

import json

import numpy as np
import pytest

from cpse.archgraph import branched_cpse, parse_graph
from cpse.cli import main
from cpse.container import Container, WeightTensor, write_lmec
from cpse.pipeline import RunConfig
from cpse.surrogate import SurrogateSpec, generate_stack


@pytest.fixture
def stack_path(tmp_path):
    c = generate_stack(SurrogateSpec(sizes=((8, 8), (16, 16), (24, 24)), seed=1))
    path = tmp_path / "stack.lmec"
    write_lmec(path, c.layers)
    return path


def test_analyze_writes_report(stack_path, tmp_path):
    out = tmp_path / "report.json"
    code = main(["analyze", str(stack_path), "--bins", "32", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["layer_count"] == 3
    assert doc["config"]["bins"] == 32
    assert doc["config"]["epsilon"] == 1e-10
    assert doc["series"]["pairs"][0]["l"] == 1


def test_analyze_prints_to_stdout(stack_path, capsys):
    assert main(["analyze", str(stack_path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert "cpse" in doc


def test_analyze_missing_file(tmp_path, capsys):
    code = main(["analyze", str(tmp_path / "missing.lmec")])
    assert code == 1
    assert "cannot open" in capsys.readouterr().err


def test_analyze_corrupt_file(tmp_path, capsys):
    bad = tmp_path / "bad.lmec"
    bad.write_bytes(b"not a container at all")
    assert main(["analyze", str(bad)]) == 1
    assert "not an LMEC file" in capsys.readouterr().err


def test_analyze_no_eligible_layers_is_pipeline_error(tmp_path, capsys):
    path = tmp_path / "biases.lmec"
    write_lmec(path, [WeightTensor.from_array("b", np.zeros(8))])
    assert main(["analyze", str(path)]) == 2
    assert "no eligible layers" in capsys.readouterr().err


def test_analyze_series_and_dumps(stack_path, tmp_path):
    series = tmp_path / "series.csv"
    omega = tmp_path / "omega.tsv"
    dens = tmp_path / "rho.tsv"
    code = main([
        "analyze", str(stack_path), "--bins", "16",
        "--out", str(tmp_path / "r.json"),
        "--series-out", str(series),
        "--dump-omega", str(omega),
        "--dump-density", str(dens),
    ])
    assert code == 0
    assert series.read_text().splitlines()[0] == "l,D_pse,log10_D_pse"
    om_lines = omega.read_text().splitlines()
    assert om_lines[0] == "layer\tbin_centre\tvalue"
    assert len(om_lines) == 1 + 3 * 16
    assert len(dens.read_text().splitlines()) == 1 + 3 * 16


def test_analyze_with_graph(tmp_path):
    rng = np.random.default_rng(0)
    names = ["a", "b", "c", "d", "e"]
    layers = [WeightTensor.from_array(n, rng.standard_normal((5, 6))) for n in names]
    doc = {
        "root": "a",
        "nodes": names,
        "edges": [["a", "b"], ["b", "c"], ["b", "d"], ["d", "e"]],
    }
    lmec = tmp_path / "net.lmec"
    write_lmec(lmec, layers)
    graph_path = tmp_path / "graph.json"
    graph_path.write_text(json.dumps(doc))
    out = tmp_path / "report.json"
    code = main(["analyze", str(lmec), "--graph", str(graph_path),
                 "--bins", "16", "--out", str(out)])
    assert code == 0
    got = json.loads(out.read_text())
    expected = branched_cpse(parse_graph(doc), Container(1, layers), RunConfig(bins=16))
    assert got["cpse"] == pytest.approx(expected.cpse, abs=1e-15)
    assert got["branches"] is not None


def test_analyze_embedded_graph_used(tmp_path):
    rng = np.random.default_rng(1)
    names = ["a", "b", "c"]
    layers = [WeightTensor.from_array(n, rng.standard_normal((4, 5))) for n in names]
    doc = {"root": "a", "nodes": names, "edges": [["a", "b"], ["a", "c"]]}
    lmec = tmp_path / "net.lmec"
    write_lmec(lmec, layers, graph=doc)
    out = tmp_path / "report.json"
    assert main(["analyze", str(lmec), "--bins", "16", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["branches"] is not None


def test_analyze_linearize_merge_graph(tmp_path):
    rng = np.random.default_rng(2)
    names = ["a", "b", "c", "d"]
    layers = [WeightTensor.from_array(n, rng.standard_normal((4, 5))) for n in names]
    doc = {"root": "a", "nodes": names,
           "edges": [["a", "b"], ["a", "c"], ["b", "d"], ["c", "d"]]}
    lmec = tmp_path / "net.lmec"
    write_lmec(lmec, layers, graph=doc)
    # merge node: plain branched analysis refuses
    assert main(["analyze", str(lmec), "--bins", "16"]) == 1
    # explicit linearization accepts
    out = tmp_path / "report.json"
    assert main(["analyze", str(lmec), "--bins", "16",
                 "--linearize", "topological", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["layer_count"] == 4


def test_surrogate_deterministic_reports(tmp_path):
    args = ["surrogate", "--sizes", "8x8,16x16,24x24", "--seed", "3", "--bins", "32"]
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    assert main(args + ["--report", str(r1)]) == 0
    assert main(args + ["--report", str(r2)]) == 0
    assert r1.read_bytes() == r2.read_bytes()
    doc = json.loads(r1.read_text())
    assert "spearman" in doc
    assert doc["config"]["surrogate"]["seed"] == 3


def test_surrogate_writes_container(tmp_path):
    out = tmp_path / "gen.lmec"
    code = main(["surrogate", "--sizes", "8x8,12x12,16x16", "--seed", "0",
                 "--out", str(out), "--report", str(tmp_path / "t.json")])
    assert code == 0
    assert out.exists()
    assert main(["inspect", str(out)]) == 0


def test_surrogate_invalid_sizes(capsys):
    assert main(["surrogate", "--sizes", "1x4"]) == 1
    assert "rows must be >= 2" in capsys.readouterr().err


def test_correlate_bundled_values(tmp_path, capsys):
    import importlib.resources
    table = importlib.resources.files("cpse").joinpath("data", "table1.csv")
    csv_path = tmp_path / "table1.csv"
    csv_path.write_text(table.read_text())
    assert main(["correlate", str(csv_path)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "group,n,rho_top1,rho_top5"
    rows = {line.split(",")[0]: line.split(",") for line in lines[1:]}
    assert abs(float(rows["resnet"][2]) - 0.94) <= 0.02
    assert abs(float(rows["vgg"][2]) - 0.44) <= 0.02
    assert abs(float(rows["vgg_bn"][2]) - 0.93) <= 0.02


def test_correlate_missing_column(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("architecture,top1,top5\nvgg11,30.98,11.37\n")
    assert main(["correlate", str(bad)]) == 1
    assert "missing column 'cpse'" in capsys.readouterr().err


def test_correlate_small_group(tmp_path, capsys):
    bad = tmp_path / "small.csv"
    bad.write_text(
        "architecture,top1,top5,cpse\nnet1,30.0,10.0,0.1\nnet2,29.0,9.0,0.2\n"
    )
    assert main(["correlate", str(bad)]) == 1
    assert "too small" in capsys.readouterr().err


def test_inspect_prints_layers(stack_path, capsys):
    assert main(["inspect", str(stack_path)]) == 0
    out = capsys.readouterr().out
    assert "layer_000" in out
    assert "shape=8x8" in out
    assert "graph: none" in out


def test_skip_log_goes_to_diagnostics(tmp_path, capsys, caplog):
    rng = np.random.default_rng(5)
    layers = [
        WeightTensor.from_array("conv", rng.standard_normal((6, 4))),
        WeightTensor.from_array("bias", np.zeros(6)),
        WeightTensor.from_array("fc", rng.standard_normal((4, 6))),
    ]
    path = tmp_path / "mixed.lmec"
    write_lmec(path, layers)
    with caplog.at_level("INFO"):
        assert main(["analyze", str(path), "--bins", "16",
                     "--out", str(tmp_path / "r.json")]) == 0
    assert "SKIP bias [6] ndim 1 < 2" in caplog.text
