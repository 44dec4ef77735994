from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from collections.abc import Sequence
from pathlib import Path

from quasicut.app import ExitStatus, exit_status_for, run_pipeline
from quasicut.core.configuration import ToolkitConfig, parse_toolkit_config, set_toolkit_config
from quasicut.core.errors import QuasicutError
from quasicut.core.logging import get_logger
from quasicut.generators.random_graphs import generate
from quasicut.generators.spec import GenFamily, GenSpec
from quasicut.graphs.io import format_graph, format_hypergraph, read_input
from quasicut.pipeline.config import ExperimentConfig, StageConfig, StageKind
from quasicut.pipeline.presets import PRESETS, get_preset
from quasicut.pipeline.reports import RunDirectory, dump_json, verify_report
from quasicut.pipeline.stages import StageContext, StageInput, StageResult, run_stage

_logcore = get_logger(__name__)

_GEN_FIELDS = ("n", "p", "t", "m", "s", "x", "y", "k", "d12", "d13", "d23", "min_degree")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Seed (master seed for `run`)")
    common.add_argument("--budget", type=int, default=None, help="Number of sampled subsets or cuts")
    common.add_argument("--tol", type=float, default=None, help="Upper tolerance gate on the headline number")
    common.add_argument("--out", type=Path, default=None, help="Output file (output directory for `run`)")
    common.add_argument(
        "--toolkit-config",
        type=argparse.FileType("r"),
        default=None,
        help="YAML toolkit configuration (workers, limits, logging)",
    )
    return common


def _add_model_options(parser: argparse.ArgumentParser) -> None:
    for name in _GEN_FIELDS:
        kind = int if name in {"n", "t", "m", "s", "k", "min_degree"} else float
        parser.add_argument(f"--{name.replace('_', '-')}", dest=name, type=kind, default=None)


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="quasicut",
        description="Measure and certify quasi-random cut properties of graphs.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", parents=[common], help="Generate a graph and write its edge list")
    gen.add_argument("--family", type=GenFamily, choices=list(GenFamily), default=None)
    gen.add_argument("--spec", type=argparse.FileType("r"), default=None, help="YAML generator specification")
    _add_model_options(gen)

    check = commands.add_parser("check", parents=[common], help="Measure a quasi-random property")
    check.add_argument("input", type=Path)
    check.add_argument("--property", required=True)
    check.add_argument("--p", type=float, default=None, help="Reference density (default: the input's density)")
    check.add_argument("--alpha", default=None, help="Size vector such as 1/3,1/3,1/3 (a single fraction for p2)")
    check.add_argument("--k", type=int, default=None)
    check.add_argument("--r", type=int, default=None, help="Number of balanced parts when --alpha is not given")
    check.add_argument("--lift-k", type=int, default=None, help="Check the k-clique hypergraph of the input graph")
    check.add_argument("--min-deviation", type=float, default=None, help="Lower gate on the deviation")

    swap = commands.add_parser("swap", parents=[common], help="Swap fractions of two parts and compare with theory")
    swap.add_argument("input", type=Path)
    swap.add_argument("--t", type=int, required=True, help="Number of consecutive equal parts")
    swap.add_argument("--i", type=int, required=True)
    swap.add_argument("--j", type=int, required=True)
    swap.add_argument("--alpha", default="1/2")
    swap.add_argument("--k", type=int, default=3)

    classify = commands.add_parser("classify", parents=[common], help="Classify a partition's density profile")
    classify.add_argument("input", type=Path, nargs="?", default=None)
    classify.add_argument("--t", type=int, required=True)
    classify.add_argument("--fit-tol", type=float, default=None)
    classify.add_argument("--targets", action="store_true", help="Classify the exact planted densities instead")
    classify.add_argument("--s", type=int, default=None)
    classify.add_argument("--x", type=float, default=None)
    classify.add_argument("--y", type=float, default=None)

    matrix = commands.add_parser("matrix", parents=[common], help="Exact rank of a combinatorial matrix")
    families = ["inclusion", "crossing_m", "crossing_n", "crossing_reduced"]
    matrix.add_argument("--family", choices=families, required=True)
    matrix.add_argument("--t", type=int, required=True)
    matrix.add_argument("--k", type=int, required=True)
    matrix.add_argument("--h", type=int, default=None)
    matrix.add_argument("--r", type=int, default=None)

    factor = commands.add_parser("factor", parents=[common], help="Search for a clique factor")
    factor.add_argument("input", type=Path)
    factor.add_argument("--k", type=int, required=True)

    run = commands.add_parser("run", parents=[common], help="Run an experiment pipeline")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", "-c", type=argparse.FileType("r"), help="YAML experiment configuration")
    source.add_argument("--preset", choices=sorted(PRESETS))
    run.add_argument("--workers", type=int, default=None)

    verify = commands.add_parser("verify", parents=[common], help="Re-evaluate report witnesses")
    verify.add_argument("reports", type=Path, nargs="+")

    return parser


def _configure_toolkit(args: argparse.Namespace) -> None:
    workers = getattr(args, "workers", None)
    if args.toolkit_config is None and workers is None:
        return

    config = ToolkitConfig()
    if args.toolkit_config is not None:
        config = parse_toolkit_config(args.toolkit_config.read(), str(Path(args.toolkit_config.name).resolve()))

    if workers is not None:
        config = dataclasses.replace(config, workers=workers)

    set_toolkit_config(config)


def _emit(data: object, out: Path | None) -> None:
    payload = dump_json(data)
    if out is None:
        sys.stdout.write(payload.decode("utf-8"))
        return

    RunDirectory(out.parent).write_bytes(out.name, payload)
    _logcore.info("Wrote {path}", path=out)


def _load_context(path: Path, out: Path | None) -> StageContext:
    loaded = read_input(path)
    reference = os.path.relpath(path.resolve(), out.resolve().parent) if out is not None else str(path)
    return StageContext(
        master_seed=0,
        run=RunDirectory(out.parent if out is not None else Path()),
        current=StageInput(artifact=reference, graph=loaded.graph, hypergraph=loaded.hypergraph),
    )


def _run_single(stage: StageConfig, args: argparse.Namespace, context: StageContext) -> ExitStatus:
    result: StageResult = run_stage(stage, 1, context)
    _emit(result.record, args.out)
    return ExitStatus.PASSED if result.passed else ExitStatus.GATE_FAILED


def _cmd_gen(args: argparse.Namespace) -> ExitStatus:
    if args.spec is not None:
        spec = GenSpec.from_yaml(args.spec.read())
        if args.seed is not None:
            spec = dataclasses.replace(spec, seed=args.seed)
    else:
        if args.family is None:
            _logcore.error("`gen` needs --family or --spec")
            return ExitStatus.INVALID
        values = {name: getattr(args, name) for name in _GEN_FIELDS}
        spec = GenSpec(family=args.family, seed=args.seed if args.seed is not None else 0, **values)

    generated = generate(spec)
    if generated.graph is not None:
        text = format_graph(generated.graph)
    else:
        text = format_hypergraph(generated.hypergraph)  # type: ignore[arg-type]

    if args.out is None:
        sys.stdout.write(text)
        return ExitStatus.PASSED

    run = RunDirectory(args.out.parent)
    run.write_text(args.out.name, text)
    run.write_json(f"{args.out.name}.meta.json", generated.metadata())
    _logcore.info("Wrote {path}", path=args.out)
    return ExitStatus.PASSED


def _cmd_check(args: argparse.Namespace) -> ExitStatus:
    stage = StageConfig(
        name="check",
        kind=StageKind.CHECK,
        seed=args.seed if args.seed is not None else 0,
        property=args.property,
        p=args.p,
        alpha=args.alpha,
        k=args.k,
        r=args.r,
        lift_k=args.lift_k,
        budget=args.budget,
        tol=args.tol,
        min_deviation=args.min_deviation,
    )
    return _run_single(stage, args, _load_context(args.input, args.out))


def _cmd_swap(args: argparse.Namespace) -> ExitStatus:
    stage = StageConfig(
        name="swap",
        kind=StageKind.SWAP,
        seed=args.seed if args.seed is not None else 0,
        t=args.t,
        i=args.i,
        j=args.j,
        alpha=args.alpha,
        k=args.k,
        tol=args.tol,
    )
    return _run_single(stage, args, _load_context(args.input, args.out))


def _cmd_classify(args: argparse.Namespace) -> ExitStatus:
    stage = StageConfig(
        name="classify",
        kind=StageKind.CLASSIFY,
        t=args.t,
        targets=args.targets,
        s=args.s,
        x=args.x,
        y=args.y,
        fit_tol=args.fit_tol,
        tol=args.tol,
    )
    if args.input is None:
        context = StageContext(master_seed=0, run=RunDirectory(Path()))
    else:
        context = _load_context(args.input, args.out)

    return _run_single(stage, args, context)


def _cmd_matrix(args: argparse.Namespace) -> ExitStatus:
    stage = StageConfig(
        name="matrix",
        kind=StageKind.MATRIX_RANK,
        seed=args.seed if args.seed is not None else 0,
        matrix=args.family,
        t=args.t,
        k=args.k,
        h=args.h,
        r=args.r,
        tol=args.tol,
    )
    return _run_single(stage, args, StageContext(master_seed=0, run=RunDirectory(Path())))


def _cmd_factor(args: argparse.Namespace) -> ExitStatus:
    stage = StageConfig(name="factor", kind=StageKind.FACTOR, k=args.k)
    return _run_single(stage, args, _load_context(args.input, args.out))


def _cmd_run(args: argparse.Namespace) -> ExitStatus:
    if args.preset is not None:
        config = get_preset(args.preset)
    else:
        config = ExperimentConfig.from_yaml(args.config.read(), str(Path(args.config.name).resolve()))

    if args.seed is not None:
        config = dataclasses.replace(config, master_seed=args.seed)

    return run_pipeline(config, output_dir=args.out)


def _cmd_verify(args: argparse.Namespace) -> ExitStatus:
    status = ExitStatus.PASSED
    for path in args.reports:
        if not verify_report(path):
            _logcore.error("Report {path} does not reproduce its recorded deviation", path=path)
            status = ExitStatus.GATE_FAILED

    return status


_COMMANDS = {
    "gen": _cmd_gen,
    "check": _cmd_check,
    "swap": _cmd_swap,
    "classify": _cmd_classify,
    "matrix": _cmd_matrix,
    "factor": _cmd_factor,
    "run": _cmd_run,
    "verify": _cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        _configure_toolkit(args)
        return int(_COMMANDS[args.command](args))

    except QuasicutError as e:
        status = exit_status_for(e)
        log = _logcore.exception if status == ExitStatus.INTERNAL else _logcore.error
        log("{error}", error=e)
        return int(status)

    except Exception as e:
        _logcore.exception("Unexpected failure: {error}", error=e)
        return int(ExitStatus.INTERNAL)


if __name__ == "__main__":
    sys.exit(main())
