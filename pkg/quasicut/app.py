from __future__ import annotations

from enum import IntEnum
from pathlib import Path

from quasicut.core.context import context_stage
from quasicut.core.errors import (
    QuasicutArtifactError,
    QuasicutBudgetError,
    QuasicutConfigurationError,
    QuasicutError,
    QuasicutValidationError,
)
from quasicut.core.logging import get_logger
from quasicut.pipeline.config import ExperimentConfig
from quasicut.pipeline.reports import MANIFEST_NAME, RunDirectory, manifest_record, stage_stem
from quasicut.pipeline.stages import StageContext, run_stage

_logcore = get_logger(__name__)


class ExitStatus(IntEnum):
    PASSED = 0
    GATE_FAILED = 1
    INVALID = 2
    INTERNAL = 3


def exit_status_for(error: BaseException) -> ExitStatus:
    if isinstance(
        error,
        QuasicutConfigurationError | QuasicutValidationError | QuasicutArtifactError | QuasicutBudgetError,
    ):
        return ExitStatus.INVALID

    return ExitStatus.INTERNAL


def run_pipeline(config: ExperimentConfig, *, output_dir: str | Path | None = None) -> ExitStatus:
    """Run every stage in order, writing one report per stage and a manifest.

    Reports carry no timestamps or host data, so a rerun of the same configuration reproduces them byte for byte.
    """
    run = RunDirectory(output_dir if output_dir is not None else config.output_dir)
    context = StageContext(master_seed=config.master_seed, run=run)
    entries: list[dict[str, object]] = []
    status = ExitStatus.PASSED

    try:
        _logcore.info(
            "Starting run `{name}` with {count} stages into {root}",
            name=config.name,
            count=len(config.stages),
            root=run.root,
        )

        for index, stage in enumerate(config.stages, start=1):
            token = context_stage.set(stage.name)
            try:
                result = run_stage(stage, index, context)
            finally:
                context_stage.reset(token)

            report_name = f"{stage_stem(index, stage.name)}.json"
            run.write_json(report_name, result.record)
            entries.append(
                {"name": stage.name, "kind": str(stage.kind), "report": report_name, "passed": result.passed},
            )

            if not result.passed:
                _logcore.error(
                    "Stage `{name}` failed its gate (headline {headline})",
                    name=stage.name,
                    headline=result.headline,
                )
                status = ExitStatus.GATE_FAILED

        if entries:
            run.write_json(MANIFEST_NAME, manifest_record(config.name, config.to_yaml(), entries))

    except QuasicutError as e:
        status = exit_status_for(e)
        log = _logcore.exception if status == ExitStatus.INTERNAL else _logcore.error
        log("Run `{name}` stopped: {error}", name=config.name, error=e)

    except Exception as e:
        status = ExitStatus.INTERNAL
        _logcore.exception("Unexpected failure in run `{name}`: {error}", name=config.name, error=e)

    finally:
        _logcore.info("Run `{name}` finished with status {status}", name=config.name, status=status.name)

    return status
