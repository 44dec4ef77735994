from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import orjson

from quasicut import __version__
from quasicut.checks.properties import evaluate_witness
from quasicut.checks.report import DeviationReport
from quasicut.core.errors import QuasicutArtifactError, QuasicutValidationError
from quasicut.core.logging import get_logger
from quasicut.core.utils import sha256_hex
from quasicut.graphs.counting import clique_hypergraph
from quasicut.graphs.graph import Graph, UniformHypergraph
from quasicut.graphs.io import read_input

_logcore = get_logger(__name__)

_JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_APPEND_NEWLINE | orjson.OPT_SERIALIZE_NUMPY
MANIFEST_NAME = "manifest.json"


def dump_json(data: object) -> bytes:
    return orjson.dumps(data, option=_JSON_OPTIONS)


def stage_stem(index: int, name: str) -> str:
    return f"{index:02d}_{name}"


class RunDirectory:
    """Append-only output directory of one run.

    Rewriting a file with the same bytes is allowed, so a deterministic rerun into the same directory succeeds;
    any other overwrite is refused.
    """

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)

    def write_bytes(self, name: str, data: bytes) -> Path:
        target = self.root / name
        if target.exists():
            if target.read_bytes() == data:
                _logcore.trace("{path} already holds identical content", path=target)
                return target

            raise QuasicutArtifactError(f"Refusing to overwrite `{target}` with different content")

        self.root.mkdir(parents=True, exist_ok=True)
        target.write_bytes(data)
        _logcore.trace("Wrote {path}", path=target)
        return target

    def write_json(self, name: str, data: object) -> Path:
        return self.write_bytes(name, dump_json(data))

    def write_text(self, name: str, text: str) -> Path:
        return self.write_bytes(name, text.encode("utf-8"))


def manifest_record(
    name: str,
    config_text: str,
    stages: Sequence[dict[str, object]],
) -> dict[str, object]:
    return {
        "name": name,
        "toolkit_version": __version__,
        "config_sha256": sha256_hex(config_text.encode("utf-8")),
        "passed": all(bool(stage["passed"]) for stage in stages),
        "stages": list(stages),
    }


def load_report(path: str | Path) -> dict[str, object]:
    source = Path(path)
    if not source.is_file():
        raise QuasicutArtifactError(f"Report `{source}` does not exist")

    try:
        data = orjson.loads(source.read_bytes())
    except orjson.JSONDecodeError as e:
        raise QuasicutArtifactError(f"Report `{source}` is not valid JSON: {e}") from e

    if not isinstance(data, dict):
        raise QuasicutArtifactError(f"Report `{source}` does not hold a JSON object")

    return data


def _resolve_input(report_path: Path, reference: str) -> Path:
    candidate = Path(reference)
    if not candidate.is_absolute():
        beside = report_path.parent / candidate
        if beside.is_file():
            return beside

    if not candidate.is_file():
        raise QuasicutArtifactError(f"Input artifact `{reference}` referenced by `{report_path}` is missing")

    return candidate


def load_witness_target(report_path: Path, record: dict[str, object]) -> Graph | UniformHypergraph:
    reference = record.get("input")
    if not isinstance(reference, str):
        raise QuasicutArtifactError(f"Report `{report_path}` does not reference an input artifact")

    loaded = read_input(_resolve_input(report_path, reference))
    lift_k = record.get("lift_k")
    if lift_k is not None:
        if loaded.graph is None:
            raise QuasicutArtifactError(f"Report `{report_path}` lifts a graph but the input is a hypergraph")
        return clique_hypergraph(loaded.graph, int(lift_k))  # type: ignore[call-overload]

    target = loaded.graph if loaded.graph is not None else loaded.hypergraph
    if target is None:
        raise QuasicutArtifactError(f"Input of `{report_path}` holds neither a graph nor a hypergraph")

    return target


def verify_report(path: str | Path) -> bool:
    """Re-evaluate the witness of a deviation report and compare it with the recorded deviation exactly."""
    report_path = Path(path)
    record = load_report(report_path)
    payload = record.get("report")
    if not isinstance(payload, dict) or "witness" not in payload:
        raise QuasicutArtifactError(f"Report `{report_path}` carries no witness to verify")

    try:
        report = DeviationReport.from_dict(payload)
    except (KeyError, TypeError, ValueError) as e:
        raise QuasicutArtifactError(f"Report `{report_path}` is malformed: {e}") from e

    target = load_witness_target(report_path, record)
    try:
        recomputed = evaluate_witness(target, report)
    except QuasicutValidationError as e:
        _logcore.warning("Witness of {path} does not apply to its input: {error}", path=report_path, error=e)
        return False

    reproduced = recomputed == report.max_abs_deviation
    log = _logcore.info if reproduced else _logcore.warning
    log(
        "Witness of {path}: recorded {recorded!r}, recomputed {recomputed!r}",
        path=report_path,
        recorded=report.max_abs_deviation,
        recomputed=recomputed,
    )
    return reproduced
