from __future__ import annotations

import logging

import orjson
import pytest

from quasicut.app import ExitStatus, run_pipeline
from quasicut.core.context import context_stage
from quasicut.core.errors import QuasicutArtifactError, QuasicutConfigurationError
from quasicut.generators.spec import GenFamily
from quasicut.pipeline import stages
from quasicut.pipeline.config import ExperimentConfig, StageConfig, StageKind
from quasicut.pipeline.presets import PRESETS, get_preset
from quasicut.pipeline.reports import MANIFEST_NAME, RunDirectory, load_report, verify_report
from quasicut.pipeline.stages import passes_gates


def small_experiment(*, tol: float | None = None) -> ExperimentConfig:
    return ExperimentConfig(
        name="small",
        master_seed=7,
        output_dir="unused",
        stages=[
            StageConfig(name="gnp", kind=StageKind.GENERATE, family=GenFamily.GNP, n=30, p=0.5),
            StageConfig(name="subsets", kind=StageKind.CHECK, property="p1", p=0.5, budget=500, tol=tol),
            StageConfig(name="cuts", kind=StageKind.CHECK, property="cut_graph", alpha="1/3,1/3,1/3", budget=200),
            StageConfig(name="inclusion", kind=StageKind.MATRIX_RANK, matrix="inclusion", t=6, h=3, k=2),
        ],
    )


def test_experiment_config_yaml_round_trip():
    config = small_experiment(tol=0.5)
    assert ExperimentConfig.from_yaml(config.to_yaml()) == config


def test_experiment_config_rejects_repeated_stage_names():
    text = """
name: twice
stages:
  - name: a
    kind: oracle_battery
  - name: a
    kind: oracle_battery
"""
    with pytest.raises(QuasicutConfigurationError):
        ExperimentConfig.from_yaml(text)


def test_experiment_config_rejects_unknown_kind():
    with pytest.raises(QuasicutConfigurationError):
        ExperimentConfig.from_yaml("name: bad\nstages:\n  - name: a\n    kind: nothing\n")


def test_gates():
    stage = StageConfig(name="g", kind=StageKind.CHECK, tol=0.1, min_deviation=0.01)
    assert passes_gates(stage, 0.05)
    assert not passes_gates(stage, 0.2)
    assert not passes_gates(stage, 0.001)
    assert not passes_gates(stage, None)
    assert passes_gates(StageConfig(name="free", kind=StageKind.CHECK), None)


def test_empty_run_writes_nothing(tmp_path):
    status = run_pipeline(ExperimentConfig(name="empty"), output_dir=tmp_path / "out")
    assert status == ExitStatus.PASSED
    assert not (tmp_path / "out").exists()


def test_small_run_writes_reports_and_manifest(tmp_path):
    assert run_pipeline(small_experiment(), output_dir=tmp_path) == ExitStatus.PASSED

    manifest = load_report(tmp_path / MANIFEST_NAME)
    assert manifest["passed"] is True
    assert [stage["report"] for stage in manifest["stages"]] == [
        "01_gnp.json",
        "02_subsets.json",
        "03_cuts.json",
        "04_inclusion.json",
    ]
    assert (tmp_path / "01_gnp.edges").is_file()

    rank = load_report(tmp_path / "04_inclusion.json")
    assert rank["rank"] == 15
    assert rank["headline"] == 0.0

    assert verify_report(tmp_path / "02_subsets.json")
    assert verify_report(tmp_path / "03_cuts.json")


def test_tampered_report_does_not_verify(tmp_path):
    run_pipeline(small_experiment(), output_dir=tmp_path)
    path = tmp_path / "02_subsets.json"
    record = load_report(path)
    record["report"]["max_abs_deviation"] += 1e-9
    path.write_bytes(orjson.dumps(record))
    assert not verify_report(path)


def test_verify_needs_a_witness(tmp_path):
    run_pipeline(small_experiment(), output_dir=tmp_path)
    with pytest.raises(QuasicutArtifactError):
        verify_report(tmp_path / "04_inclusion.json")

    with pytest.raises(QuasicutArtifactError):
        verify_report(tmp_path / "missing.json")


def test_rerun_reproduces_every_byte(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    run_pipeline(small_experiment(), output_dir=first)
    run_pipeline(small_experiment(), output_dir=second)
    names = sorted(path.name for path in first.iterdir())
    assert names == sorted(path.name for path in second.iterdir())
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()

    assert run_pipeline(small_experiment(), output_dir=first) == ExitStatus.PASSED


def test_run_directory_refuses_different_overwrite(tmp_path):
    run = RunDirectory(tmp_path)
    run.write_text("a.txt", "one")
    run.write_text("a.txt", "one")
    with pytest.raises(QuasicutArtifactError):
        run.write_text("a.txt", "two")


def test_changed_seed_into_same_directory_is_refused(tmp_path):
    run_pipeline(small_experiment(), output_dir=tmp_path)
    config = ExperimentConfig(
        name="small",
        master_seed=8,
        stages=small_experiment().stages,
    )
    assert run_pipeline(config, output_dir=tmp_path) == ExitStatus.INVALID


def test_failed_gate_exits_with_one(tmp_path):
    assert run_pipeline(small_experiment(tol=0.0), output_dir=tmp_path) == ExitStatus.GATE_FAILED
    manifest = load_report(tmp_path / MANIFEST_NAME)
    assert manifest["passed"] is False
    assert (tmp_path / "04_inclusion.json").is_file()


def test_stage_without_input_is_a_configuration_error(tmp_path):
    config = ExperimentConfig(
        name="orphan",
        stages=[StageConfig(name="subsets", kind=StageKind.CHECK, property="p1")],
    )
    assert run_pipeline(config, output_dir=tmp_path) == ExitStatus.INVALID


def test_structure_stages_on_planted_targets(tmp_path):
    config = ExperimentConfig(
        name="targets",
        stages=[
            StageConfig(name="residuals", kind=StageKind.RESIDUALS, targets=True, t=6, s=2, x=0.25, y=0.36, tol=1e-12),
            StageConfig(
                name="classify",
                kind=StageKind.CLASSIFY,
                targets=True,
                t=6,
                s=2,
                x=0.25,
                y=0.36,
                expect="special_vertex",
                fit_tol=1e-9,
            ),
            StageConfig(name="excellent", kind=StageKind.EXCELLENT, targets=True, t=6, s=2, x=0.25, y=0.36, k=4),
        ],
    )
    assert run_pipeline(config, output_dir=tmp_path) == ExitStatus.PASSED
    verdict = load_report(tmp_path / "02_classify.json")["verdict"]
    assert verdict["tag"] == "special_vertex"
    assert verdict["s"] == 2


def test_battery_stages(tmp_path):
    config = ExperimentConfig(
        name="batteries",
        stages=[
            StageConfig(name="identities", kind=StageKind.SUBSTITUTION_BATTERY, count=30),
            StageConfig(name="membership", kind=StageKind.MEMBERSHIP_BATTERY, t=4, k=2),
            StageConfig(name="kernels", kind=StageKind.ORACLE_BATTERY, count=3),
            StageConfig(name="factors", kind=StageKind.FACTOR_BATTERY, count=3),
        ],
    )
    assert run_pipeline(config, output_dir=tmp_path) == ExitStatus.PASSED
    record = load_report(tmp_path / "01_identities.json")
    assert record["passed"] is True
    assert record["battery"]["failures"] == []


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_build(name: str):
    config = get_preset(name)
    assert config.name in PRESETS
    assert get_preset(config.name) == config
    assert config.stages
    assert ExperimentConfig.from_yaml(config.to_yaml()) == config


def test_separation_preset_is_registered_under_both_names():
    config = get_preset("theorem-1-2-separation")
    assert config.name == "theorem-1-2-separation"
    assert get_preset("half-split-separation") == config
    assert [stage.name for stage in config.stages] == ["half-split", "balanced-cuts", "subsets"]


def test_unknown_preset():
    with pytest.raises(QuasicutConfigurationError):
        get_preset("nothing")


@pytest.mark.slow
def test_separation_preset_passes(tmp_path):
    assert run_pipeline(get_preset("theorem-1-2-separation"), output_dir=tmp_path) == ExitStatus.PASSED
    assert verify_report(tmp_path / "02_balanced-cuts.json")
    assert verify_report(tmp_path / "03_subsets.json")


class _RecordList(logging.Handler):
    def __init__(self) -> None:
        super().__init__(logging.DEBUG)
        self.records: list[logging.LogRecord] = []

    def emit(self, record: logging.LogRecord) -> None:
        self.records.append(record)


def test_stage_logger_reads_the_running_stage_per_record():
    handler = _RecordList()
    logger = logging.getLogger(f"{stages.__name__}.stage")
    logger.addHandler(handler)
    try:
        stages._logcore.info("outside")  # noqa: SLF001
        token = context_stage.set("cuts")
        try:
            stages._logcore.info("inside {value}", value=1)  # noqa: SLF001
        finally:
            context_stage.reset(token)
    finally:
        logger.removeHandler(handler)

    assert [record.stage for record in handler.records] == ["-", "cuts"]  # type: ignore[attr-defined]
    assert handler.records[1].getMessage() == "inside 1"
