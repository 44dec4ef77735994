from __future__ import annotations

import orjson

from quasicut.cli import main
from quasicut.graphs.io import read_input
from quasicut.pipeline.reports import MANIFEST_NAME, load_report


def test_gen_writes_edge_list_and_metadata(tmp_path):
    out = tmp_path / "g.edges"
    assert main(["gen", "--family", "gnp", "--n", "20", "--p", "0.5", "--seed", "3", "--out", str(out)]) == 0
    assert read_input(out).graph.n == 20
    metadata = load_report(tmp_path / "g.edges.meta.json")
    assert metadata["family"] == "gnp"


def test_gen_without_family_is_invalid(capsys):
    assert main(["gen", "--n", "20"]) == 2
    assert capsys.readouterr().out == ""


def test_gen_from_spec_file(tmp_path):
    spec = tmp_path / "spec.yaml"
    spec.write_text("family: half_split\nseed: 1\nn: 40\np: 0.3\n")
    out = tmp_path / "h.edges"
    assert main(["gen", "--spec", str(spec), "--out", str(out)]) == 0
    assert read_input(out).graph.n == 40


def test_check_then_verify(tmp_path):
    graph = tmp_path / "g.edges"
    report = tmp_path / "reports" / "p1.json"
    main(["gen", "--family", "gnp", "--n", "24", "--p", "0.5", "--out", str(graph)])
    assert main(["check", str(graph), "--property", "p1", "--budget", "300", "--out", str(report)]) == 0
    assert load_report(report)["report"]["property"] == "p1"
    assert main(["verify", str(report)]) == 0


def test_check_prints_to_stdout(tmp_path, capsys):
    graph = tmp_path / "g.edges"
    main(["gen", "--family", "gnp", "--n", "12", "--p", "0.5", "--out", str(graph)])
    capsys.readouterr()
    assert main(["check", str(graph), "--property", "cut_graph", "--r", "2"]) == 0
    record = orjson.loads(capsys.readouterr().out)
    assert record["report"]["mode"] == "exhaustive"
    assert record["report"]["samples"] == 924


def test_check_gate_failure(tmp_path):
    graph = tmp_path / "g.edges"
    main(["gen", "--family", "gnp", "--n", "20", "--p", "0.5", "--out", str(graph)])
    assert main(["check", str(graph), "--property", "p3", "--p", "0.9", "--tol", "0.01"]) == 1


def test_check_missing_input_is_invalid(tmp_path):
    assert main(["check", str(tmp_path / "absent.edges"), "--property", "p1"]) == 2


def test_check_unknown_property_is_invalid(tmp_path):
    graph = tmp_path / "g.edges"
    main(["gen", "--family", "gnp", "--n", "10", "--p", "0.5", "--out", str(graph)])
    assert main(["check", str(graph), "--property", "p9"]) == 2


def test_matrix_rank(capsys):
    assert main(["matrix", "--family", "inclusion", "--t", "6", "--k", "2", "--h", "3"]) == 0
    record = orjson.loads(capsys.readouterr().out)
    assert record["rank"] == 15
    assert record["rows"] == 20


def test_classify_targets(capsys):
    argv = ["classify", "--t", "6", "--targets", "--s", "1", "--x", "0.25", "--y", "0.36", "--fit-tol", "1e-9"]
    assert main(argv) == 0
    assert orjson.loads(capsys.readouterr().out)["verdict"]["s"] == 1


def test_factor(tmp_path):
    graph = tmp_path / "t.edges"
    graph.write_text("6 6\n0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n")
    assert main(["factor", str(graph), "--k", "3"]) == 0
    graph.write_text("6 5\n0 1\n1 2\n0 2\n3 4\n4 5\n")
    assert main(["factor", str(graph), "--k", "3"]) == 1


def test_run_config(tmp_path):
    config = tmp_path / "experiment.yaml"
    config.write_text(
        """
name: cli-run
master_seed: 2
stages:
  - name: gnp
    kind: generate
    family: gnp
    n: 30
    p: 0.5
  - name: subsets
    kind: check
    property: p1
    budget: 200
""",
    )
    out = tmp_path / "run"
    assert main(["run", "--config", str(config), "--out", str(out)]) == 0
    assert load_report(out / MANIFEST_NAME)["passed"] is True
    assert main(["verify", str(out / "02_subsets.json")]) == 0


def test_run_with_workers_and_toolkit_config(tmp_path):
    toolkit = tmp_path / "toolkit.yaml"
    toolkit.write_text("workers: 2\n")
    config = tmp_path / "experiment.yaml"
    config.write_text("name: kernels\nstages:\n  - name: kernels\n    kind: oracle_battery\n    count: 4\n")
    out = tmp_path / "run"
    argv = ["run", "--config", str(config), "--toolkit-config", str(toolkit), "--workers", "3"]
    assert main([*argv, "--out", str(out)]) == 0
    assert (out / "01_kernels.json").is_file()


def test_invalid_experiment_config(tmp_path):
    config = tmp_path / "bad.yaml"
    config.write_text("name: bad\nstages: 3\n")
    assert main(["run", "--config", str(config), "--out", str(tmp_path / "run")]) == 2
