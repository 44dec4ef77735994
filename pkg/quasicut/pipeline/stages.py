from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from quasicut.checks.properties import (
    check_clique_cut,
    check_cut_graph,
    check_cut_hypergraph,
    check_hypergraph_p1,
    check_p1,
    check_p2,
    check_p3,
    subset_concentration,
)
from quasicut.checks.regularity import reduced_graph, regularity_deviation
from quasicut.checks.report import DeviationReport, PropertyTag
from quasicut.core.errors import QuasicutConfigurationError, QuasicutValidationError
from quasicut.core.logging import get_stage_logger
from quasicut.core.utils import balanced_alpha, derive_seed, parse_alpha, parse_fraction
from quasicut.generators.random_graphs import generate, planted_targets
from quasicut.graphs.counting import clique_density_vector, clique_hypergraph, partition_stats
from quasicut.graphs.graph import Graph, PartitionStats, UniformHypergraph
from quasicut.graphs.io import format_graph, format_hypergraph
from quasicut.linalg.density_space import distance_to_W
from quasicut.linalg.exact import ExactMatrix, rank_exact
from quasicut.linalg.families import (
    crossing_matrix_M,
    crossing_submatrix_N,
    inclusion_matrix,
    reduced_crossing_matrix,
)
from quasicut.pipeline import batteries
from quasicut.pipeline.config import StageConfig, StageKind
from quasicut.pipeline.reports import RunDirectory, stage_stem
from quasicut.structure.classifier import VerdictTag, classify_structure
from quasicut.structure.excellent import excellent_analysis
from quasicut.structure.factor import clique_factor, factor_structure
from quasicut.structure.residuals import residual_matrix
from quasicut.structure.swap import predicted_d_prime_vector, swap_experiment

_logcore = get_stage_logger(__name__)

DEFAULT_BUDGET = 1000
DEFAULT_TRIALS = 100
DEFAULT_FIT_TOL = 0.02


@dataclass(frozen=True, kw_only=True)
class StageInput:
    """The input produced by the latest ``generate`` stage, with the run-relative name of its edge list."""

    artifact: str
    graph: Graph | None = None
    hypergraph: UniformHypergraph | None = None
    parts: tuple[tuple[int, ...], ...] = ()


@dataclass(kw_only=True)
class StageContext:
    master_seed: int
    run: RunDirectory
    current: StageInput | None = None


@dataclass(frozen=True, kw_only=True)
class StageResult:
    name: str
    kind: StageKind
    passed: bool
    headline: float | None
    record: dict[str, object] = field(default_factory=dict)


def stage_seed(stage: StageConfig, master_seed: int) -> int:
    return stage.seed if stage.seed is not None else derive_seed(master_seed, stage.name)


def passes_gates(stage: StageConfig, headline: float | None) -> bool:
    if headline is None:
        return stage.tol is None and stage.min_deviation is None

    if stage.tol is not None and not headline <= stage.tol:
        return False

    return stage.min_deviation is None or headline >= stage.min_deviation


def _require(stage: StageConfig, *names: str) -> None:
    missing = [name for name in names if getattr(stage, name) is None]
    if missing:
        raise QuasicutConfigurationError(f"Stage `{stage.name}` ({stage.kind}) needs: {', '.join(missing)}")


def _input(stage: StageConfig, context: StageContext) -> StageInput:
    if context.current is None:
        raise QuasicutConfigurationError(f"Stage `{stage.name}` needs a preceding generate stage")

    return context.current


def _graph(stage: StageConfig, context: StageContext) -> Graph:
    current = _input(stage, context)
    if current.graph is None:
        raise QuasicutConfigurationError(f"Stage `{stage.name}` needs a graph input, the current input is a hypergraph")

    return current.graph


def _parts(stage: StageConfig, context: StageContext) -> tuple[tuple[int, ...], ...]:
    g = _graph(stage, context)
    if stage.t is not None:
        if stage.t < 1 or g.n % stage.t != 0:
            raise QuasicutValidationError(f"Cannot split {g.n} vertices into {stage.t} equal parts")
        m = g.n // stage.t
        return tuple(tuple(range(i * m, (i + 1) * m)) for i in range(stage.t))

    parts = _input(stage, context).parts
    if not parts:
        raise QuasicutConfigurationError(f"Stage `{stage.name}` needs parts: the input has none and `t` is not set")

    return parts


def _stats(stage: StageConfig, context: StageContext) -> PartitionStats:
    if stage.targets:
        _require(stage, "t", "s", "x", "y")
        within, pairs = planted_targets(stage.t, stage.s, stage.x, stage.y)  # type: ignore[arg-type]
        return PartitionStats.from_targets(within, pairs)

    return partition_stats(_graph(stage, context), _parts(stage, context))


def _density(target: Graph | UniformHypergraph) -> float:
    k = target.k if isinstance(target, UniformHypergraph) else 2
    slots = math.comb(target.n, k)
    return target.m / slots if slots else 0.0


def _alpha(stage: StageConfig, default_parts: int) -> tuple[Fraction, ...]:
    if stage.alpha is not None:
        return parse_alpha(stage.alpha)

    return balanced_alpha(stage.r if stage.r is not None else default_parts)


def _result(
    stage: StageConfig,
    seed: int | None,
    headline: float | None,
    body: dict[str, object],
    *,
    own_criterion: bool = True,
    **extra: object,
) -> StageResult:
    passed = own_criterion and passes_gates(stage, headline)
    record: dict[str, object] = {
        "stage": stage.name,
        "kind": str(stage.kind),
        "seed": seed,
        "passed": passed,
        "headline": headline,
        "gates": {"tol": stage.tol, "min_deviation": stage.min_deviation},
        **extra,
        **body,
    }
    return StageResult(name=stage.name, kind=stage.kind, passed=passed, headline=headline, record=record)


# --------------------------------------------------------------------------- input stages


def _run_generate(stage: StageConfig, index: int, context: StageContext) -> StageResult:
    seed = stage_seed(stage, context.master_seed)
    generated = generate(stage.gen_spec(seed))
    artifact = f"{stage_stem(index, stage.name)}.edges"
    if generated.graph is not None:
        context.run.write_text(artifact, format_graph(generated.graph))
    elif generated.hypergraph is not None:
        context.run.write_text(artifact, format_hypergraph(generated.hypergraph))

    context.current = StageInput(
        artifact=artifact,
        graph=generated.graph,
        hypergraph=generated.hypergraph,
        parts=generated.parts,
    )
    _logcore.info("Generated {artifact}", artifact=artifact)
    return _result(stage, seed, None, {"artifact": artifact, "metadata": generated.metadata()})


def _hypergraph_target(stage: StageConfig, context: StageContext) -> tuple[UniformHypergraph, int | None]:
    current = _input(stage, context)
    if current.hypergraph is not None:
        return current.hypergraph, None

    _require(stage, "lift_k")
    return clique_hypergraph(_graph(stage, context), stage.lift_k), stage.lift_k  # type: ignore[arg-type]


def _run_check(stage: StageConfig, _index: int, context: StageContext) -> StageResult:
    _require(stage, "property")
    try:
        tag = PropertyTag(stage.property)
    except ValueError as e:
        raise QuasicutConfigurationError(f"Stage `{stage.name}` names an unknown property `{stage.property}`") from e

    seed = stage_seed(stage, context.master_seed)
    budget = stage.budget if stage.budget is not None else DEFAULT_BUDGET
    lift_k: int | None = None
    report: DeviationReport

    if tag in {PropertyTag.CUT_HYPERGRAPH, PropertyTag.HYPERGRAPH_P1}:
        h, lift_k = _hypergraph_target(stage, context)
        p = stage.p if stage.p is not None else _density(h)
        if tag == PropertyTag.CUT_HYPERGRAPH:
            report = check_cut_hypergraph(h, p, _alpha(stage, h.k), budget, seed)
        else:
            report = check_hypergraph_p1(h, p, budget, seed)
    else:
        g = _graph(stage, context)
        p = stage.p if stage.p is not None else _density(g)
        match tag:
            case PropertyTag.P1:
                report = check_p1(g, p, budget, seed)
            case PropertyTag.P2:
                _require(stage, "alpha")
                report = check_p2(g, p, float(parse_fraction(stage.alpha)), budget, seed)  # type: ignore[arg-type]
            case PropertyTag.P3:
                report = check_p3(g, p)
            case PropertyTag.CUT_GRAPH:
                report = check_cut_graph(g, p, _alpha(stage, 2), budget, seed)
            case PropertyTag.CLIQUE_CUT:
                k = stage.k if stage.k is not None else 3
                report = check_clique_cut(g, p, k, _alpha(stage, k), budget, seed)
            case _:
                raise QuasicutConfigurationError(f"Property `{tag}` is checked by a `regularity` stage")

    _logcore.info(
        "{property}: max deviation {deviation:.6f} ({mode}, {samples} samples)",
        property=tag,
        deviation=report.max_abs_deviation,
        mode=report.mode,
        samples=report.samples,
    )
    return _result(
        stage,
        seed,
        report.max_abs_deviation,
        {"report": report.to_dict()},
        input=_input(stage, context).artifact,
        lift_k=lift_k,
    )


def _run_concentration(stage: StageConfig, _index: int, context: StageContext) -> StageResult:
    seed = stage_seed(stage, context.master_seed)
    trials = stage.trials if stage.trials is not None else DEFAULT_TRIALS
    alpha = float(parse_fraction(stage.alpha)) if stage.alpha is not None else 0.5
    fit_tol = stage.fit_tol if stage.fit_tol is not None else 0.01
    report = subset_concentration(_graph(stage, context), alpha, trials, fit_tol, seed)
    required = stage.count if stage.count is not None else trials
    _logcore.info("{passed} of {trials} subsets within {tol}", passed=report.passed, trials=trials, tol=fit_tol)
    return _result(
        stage,
        seed,
        max(report.deviations, default=0.0),
        {"concentration": report.to_dict(), "required_passes": required},
        own_criterion=report.passed >= required,
    )


def _run_regularity(stage: StageConfig, _index: int, context: StageContext) -> StageResult:
    _require(stage, "i", "j", "epsilon")
    seed = stage_seed(stage, context.master_seed)
    parts = _parts(stage, context)
    report = regularity_deviation(
        _graph(stage, context),
        parts[stage.i],  # type: ignore[index]
        parts[stage.j],  # type: ignore[index]
        stage.epsilon,  # type: ignore[arg-type]
        stage.trials if stage.trials is not None else DEFAULT_TRIALS,
        seed,
    )
    return _result(
        stage,
        seed,
        report.max_abs_deviation,
        {"report": report.to_dict()},
        input=_input(stage, context).artifact,
        lift_k=None,
    )


def _run_reduced_graph(stage: StageConfig, _index: int, context: StageContext) -> StageResult:
    _require(stage, "epsilon")
    seed = stage_seed(stage, context.master_seed)
    trials = stage.trials if stage.trials is not None else DEFAULT_TRIALS
    epsilon: float = stage.epsilon  # type: ignore[assignment]
    reduced = reduced_graph(_graph(stage, context), _parts(stage, context), epsilon, trials, seed)
    return _result(stage, seed, float(reduced.irregular_pairs), {"reduced_graph": reduced.to_dict()})


# --------------------------------------------------------------------------- structure stages


def _run_swap(stage: StageConfig, _index: int, context: StageContext) -> StageResult:
    _require(stage, "i", "j", "alpha")
    seed = stage_seed(stage, context.master_seed)
    g = _graph(stage, context)
    parts = _parts(stage, context)
    k = stage.k if stage.k is not None else 3
    i: int = stage.i  # type: ignore[assignment]
    j: int = stage.j  # type: ignore[assignment]
    outcome = swap_experiment(g, parts, i, j, float(parse_fraction(stage.alpha)), seed, k=k)  # type: ignore[arg-type]
    predicted = predicted_d_prime_vector(partition_stats(g, parts), k, i, j, outcome.realized_alpha)
    error = float(np.max(np.abs(outcome.d_prime.values - predicted.values)))
    _logcore.info("Swap of parts {i} and {j}: max |d' - prediction| = {error:.5f}", i=i, j=j, error=error)
    return _result(stage, seed, error, {"swap": outcome.to_dict(), "predicted_d_prime": predicted.to_dict()})


def _run_residuals(stage: StageConfig, _index: int, context: StageContext) -> StageResult:
    stats = _stats(stage, context)
    summary = residual_matrix(stats)
    return _result(stage, None, summary.max_abs, {"residuals": summary.to_dict(), "stats": stats.to_dict()})


def _run_classify(stage: StageConfig, _index: int, context: StageContext) -> StageResult:
    stats = _stats(stage, context)
    fit_tol = stage.fit_tol if stage.fit_tol is not None else DEFAULT_FIT_TOL
    verdict = classify_structure(stats, fit_tol)
    if stage.expect is not None:
        try:
            own = verdict.tag == VerdictTag(stage.expect)
        except ValueError as e:
            raise QuasicutConfigurationError(f"Stage `{stage.name}` expects an unknown verdict `{stage.expect}`") from e
        if own and stage.s is not None and verdict.tag == VerdictTag.SPECIAL_VERTEX:
            own = verdict.s == stage.s
    else:
        own = verdict.tag != VerdictTag.UNSTRUCTURED

    _logcore.info("Structure verdict: {tag}", tag=verdict.tag)
    headline = verdict.residuals.get(str(verdict.tag))
    return _result(stage, None, headline, {"verdict": verdict.to_dict()}, own_criterion=own)


def _run_excellent(stage: StageConfig, _index: int, context: StageContext) -> StageResult:
    stats = _stats(stage, context)
    analysis = excellent_analysis(
        stats,
        stage.k if stage.k is not None else 4,
        stage.fit_tol if stage.fit_tol is not None else DEFAULT_FIT_TOL,
    )
    return _result(stage, None, analysis.max_excellent_spread, {"excellent": analysis.to_dict()})


def _run_factor(stage: StageConfig, _index: int, context: StageContext) -> StageResult:
    _require(stage, "k")
    factor = clique_factor(_graph(stage, context), stage.k)  # type: ignore[arg-type]
    return _result(stage, None, float(factor.nodes), {"factor": factor.to_dict()}, own_criterion=factor.found)


def _run_factor_structure(stage: StageConfig, _index: int, context: StageContext) -> StageResult:
    _require(stage, "epsilon")
    seed = stage_seed(stage, context.master_seed)
    g = _graph(stage, context)
    parts = _parts(stage, context)
    trials = stage.trials if stage.trials is not None else DEFAULT_TRIALS
    reduced = reduced_graph(g, parts, stage.epsilon, trials, seed)  # type: ignore[arg-type]
    fit_tol = stage.fit_tol if stage.fit_tol is not None else DEFAULT_FIT_TOL
    structure = factor_structure(partition_stats(g, parts), reduced.as_graph(), fit_tol)
    return _result(
        stage,
        seed,
        float(structure.special_cliques),
        {"reduced_graph": reduced.to_dict(), "factor_structure": structure.to_dict()},
        own_criterion=structure.factor.found,
    )


# --------------------------------------------------------------------------- linear algebra stages


def _run_distance(stage: StageConfig, _index: int, context: StageContext) -> StageResult:
    k = stage.k if stage.k is not None else 3
    density = clique_density_vector(_graph(stage, context), _parts(stage, context), k)
    p = stage.p if stage.p is not None else float(np.mean(density.values))
    distance = distance_to_W(density, p, exact_linf=stage.exact_linf)
    body = {"p": p, "density": density.to_dict(), "distance": distance.to_dict()}
    return _result(stage, None, distance.linf_residual, body)


def _matrix(stage: StageConfig) -> ExactMatrix:
    _require(stage, "matrix", "t", "k")
    t, k = stage.t, stage.k
    match stage.matrix:
        case "inclusion":
            _require(stage, "h")
            return inclusion_matrix(t, stage.h, k)  # type: ignore[arg-type]
        case "crossing_m":
            _require(stage, "r")
            return crossing_matrix_M(t, stage.r, k)  # type: ignore[arg-type]
        case "crossing_n":
            _require(stage, "r")
            return crossing_submatrix_N(t, stage.r, k)  # type: ignore[arg-type]
        case "crossing_reduced":
            _require(stage, "r")
            return reduced_crossing_matrix(t, stage.r, k)  # type: ignore[arg-type]

    raise QuasicutConfigurationError(f"Unknown matrix family `{stage.matrix}`")


def _run_matrix_rank(stage: StageConfig, _index: int, context: StageContext) -> StageResult:
    seed = stage_seed(stage, context.master_seed)
    matrix = _matrix(stage)
    rank = rank_exact(matrix, seed=seed)
    rows, cols = matrix.shape
    _logcore.info("rank {name} = {rank} ({rows}x{cols})", name=matrix.name, rank=rank, rows=rows, cols=cols)
    body = {"matrix": matrix.name, "rows": rows, "cols": cols, "rank": rank, "flags": list(matrix.flags)}
    return _result(stage, seed, float(cols - rank), body, own_criterion=rank == cols)


# --------------------------------------------------------------------------- batteries


def _battery_result(stage: StageConfig, seed: int | None, battery: batteries.BatteryResult) -> StageResult:
    log = _logcore.info if battery.passed else _logcore.error
    log(
        "{battery}: {failed} of {total} cases failed",
        battery=battery.name,
        failed=len(battery.failures),
        total=len(battery.cases),
    )
    return _result(
        stage,
        seed,
        float(len(battery.failures)),
        {"battery": battery.to_dict()},
        own_criterion=battery.passed,
    )


def _run_battery(stage: StageConfig, _index: int, context: StageContext) -> StageResult:  # noqa: PLR0911
    seed = stage_seed(stage, context.master_seed)
    count = stage.count
    match stage.kind:
        case StageKind.ORACLE_BATTERY:
            return _battery_result(stage, seed, batteries.oracle_equivalence(count or 100, seed))
        case StageKind.INCLUSION_RANK_SWEEP:
            return _battery_result(stage, seed, batteries.inclusion_rank_sweep(stage.t_max or 12, seed))
        case StageKind.CROSSING_RANK_SWEEP:
            ks = (stage.k,) if stage.k is not None else (3, 4)
            return _battery_result(stage, seed, batteries.crossing_rank_sweep(stage.t_max or 12, seed, ks))
        case StageKind.CLASSIFIER_BATTERY:
            battery = batteries.classifier_battery(
                count or 20,
                seed,
                t=stage.t or 8,
                m=stage.m or 400,
                x=stage.x if stage.x is not None else 0.25,
                y=stage.y if stage.y is not None else 0.36,
                p=stage.p if stage.p is not None else 0.5,
                tol=stage.fit_tol if stage.fit_tol is not None else DEFAULT_FIT_TOL,
            )
            return _battery_result(stage, seed, battery)
        case StageKind.SUBSTITUTION_BATTERY:
            ks = (stage.k,) if stage.k is not None else (4, 5, 6)
            tol = stage.fit_tol if stage.fit_tol is not None else 1e-12
            return _battery_result(stage, seed, batteries.substitution_battery(count or 10_000, seed, ks=ks, tol=tol))
        case StageKind.MEMBERSHIP_BATTERY:
            ps = (stage.p,) if stage.p is not None else (0.25, 0.5)
            tol = stage.fit_tol if stage.fit_tol is not None else 1e-10
            return _battery_result(stage, None, batteries.membership_battery(stage.t or 8, stage.k or 3, ps, tol=tol))
        case StageKind.FACTOR_BATTERY:
            battery = batteries.factor_battery(
                count or 100,
                seed,
                n=stage.n or 12,
                k=stage.k or 3,
                min_degree=stage.min_degree if stage.min_degree is not None else 8,
            )
            return _battery_result(stage, seed, battery)

    raise QuasicutConfigurationError(f"Stage kind `{stage.kind}` is not a battery")


_RUNNERS: dict[StageKind, Callable[[StageConfig, int, StageContext], StageResult]] = {
    StageKind.GENERATE: _run_generate,
    StageKind.CHECK: _run_check,
    StageKind.CONCENTRATION: _run_concentration,
    StageKind.REGULARITY: _run_regularity,
    StageKind.REDUCED_GRAPH: _run_reduced_graph,
    StageKind.SWAP: _run_swap,
    StageKind.RESIDUALS: _run_residuals,
    StageKind.CLASSIFY: _run_classify,
    StageKind.EXCELLENT: _run_excellent,
    StageKind.FACTOR: _run_factor,
    StageKind.FACTOR_STRUCTURE: _run_factor_structure,
    StageKind.DISTANCE: _run_distance,
    StageKind.MATRIX_RANK: _run_matrix_rank,
}


def run_stage(stage: StageConfig, index: int, context: StageContext) -> StageResult:
    """Run one stage against the context's current input; ``generate`` stages replace that input."""
    runner = _RUNNERS.get(stage.kind, _run_battery)
    return runner(stage, index, context)
