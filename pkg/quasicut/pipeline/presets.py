from __future__ import annotations

from collections.abc import Callable

from quasicut.core.errors import QuasicutConfigurationError
from quasicut.generators.spec import GenFamily
from quasicut.pipeline.config import ExperimentConfig, StageConfig, StageKind


def _experiment(name: str, *stages: StageConfig) -> ExperimentConfig:
    return ExperimentConfig(name=name, master_seed=0, output_dir=f"runs/{name}", stages=list(stages))


def oracle_equivalence() -> ExperimentConfig:
    return _experiment(
        "oracle-equivalence",
        StageConfig(name="kernels", kind=StageKind.ORACLE_BATTERY, count=100),
    )


def gottlieb_sweep() -> ExperimentConfig:
    return _experiment(
        "gottlieb-sweep",
        StageConfig(name="inclusion-ranks", kind=StageKind.INCLUSION_RANK_SWEEP, t_max=12),
    )


def crossing_rank_sweep() -> ExperimentConfig:
    return _experiment(
        "crossing-rank-sweep",
        StageConfig(name="crossing-ranks", kind=StageKind.CROSSING_RANK_SWEEP, t_max=12),
    )


def half_split_separation() -> ExperimentConfig:
    return _experiment(
        "theorem-1-2-separation",
        StageConfig(name="half-split", kind=StageKind.GENERATE, family=GenFamily.HALF_SPLIT, n=600, p=0.3),
        StageConfig(
            name="balanced-cuts",
            kind=StageKind.CHECK,
            property="cut_graph",
            p=0.3,
            alpha="1/2,1/2",
            budget=10_000,
            tol=0.02,
        ),
        StageConfig(name="subsets", kind=StageKind.CHECK, property="p1", p=0.3, budget=1000, min_deviation=0.03),
    )


def clique_cut_forward() -> ExperimentConfig:
    return _experiment(
        "clique-cut-forward",
        StageConfig(name="gnp", kind=StageKind.GENERATE, family=GenFamily.GNP, n=600, p=0.5),
        StageConfig(
            name="triangle-cuts",
            kind=StageKind.CHECK,
            property="clique_cut",
            p=0.5,
            k=3,
            alpha="1/3,1/3,1/3",
            budget=200,
            tol=0.02,
        ),
        StageConfig(
            name="half-subsets",
            kind=StageKind.CHECK,
            property="p2",
            p=0.5,
            alpha="1/2",
            budget=1000,
            tol=0.02,
        ),
    )


def swap_calculus() -> ExperimentConfig:
    return _experiment(
        "swap-calculus",
        StageConfig(
            name="planted",
            kind=StageKind.GENERATE,
            family=GenFamily.PLANTED_STRUCTURE,
            t=6,
            m=300,
            s=0,
            x=0.25,
            y=0.36,
        ),
        StageConfig(name="swap-special", kind=StageKind.SWAP, i=0, j=1, alpha="1/2", tol=0.03),
        StageConfig(name="swap-background", kind=StageKind.SWAP, i=2, j=3, alpha="1/4", tol=0.03),
        StageConfig(name="measured-residuals", kind=StageKind.RESIDUALS, tol=0.03),
        StageConfig(
            name="target-residuals",
            kind=StageKind.RESIDUALS,
            targets=True,
            t=6,
            s=0,
            x=0.25,
            y=0.36,
            tol=1e-12,
        ),
        StageConfig(name="gnp-blocks", kind=StageKind.GENERATE, family=GenFamily.GNP, n=1800, p=0.5),
        StageConfig(name="swap-gnp", kind=StageKind.SWAP, t=6, i=0, j=1, alpha="1/2", tol=0.03),
    )


def structure_classifier() -> ExperimentConfig:
    return _experiment(
        "structure-classifier",
        StageConfig(name="recover-planted", kind=StageKind.CLASSIFIER_BATTERY, count=20, t=8, m=400, fit_tol=0.02),
        StageConfig(
            name="planted",
            kind=StageKind.GENERATE,
            family=GenFamily.PLANTED_STRUCTURE,
            t=8,
            m=200,
            s=3,
            x=0.25,
            y=0.36,
        ),
        StageConfig(name="classify", kind=StageKind.CLASSIFY, expect="special_vertex", s=3, fit_tol=0.02),
        StageConfig(name="excellent-4", kind=StageKind.EXCELLENT, k=4, fit_tol=0.05),
    )


def substitution_identities() -> ExperimentConfig:
    return _experiment(
        "substitution-identities",
        StageConfig(name="identities", kind=StageKind.SUBSTITUTION_BATTERY, count=10_000),
    )


def distance_to_w() -> ExperimentConfig:
    return _experiment(
        "distance-to-w",
        StageConfig(name="gnp", kind=StageKind.GENERATE, family=GenFamily.GNP, n=400, p=0.5),
        StageConfig(name="triangle-lift", kind=StageKind.DISTANCE, t=8, k=3, tol=0.05),
        StageConfig(name="membership", kind=StageKind.MEMBERSHIP_BATTERY, t=8, k=3),
    )


def hajnal_szemeredi() -> ExperimentConfig:
    return _experiment(
        "hajnal-szemeredi",
        StageConfig(name="triangle-factors", kind=StageKind.FACTOR_BATTERY, count=100, n=12, k=3, min_degree=8),
    )


def subset_concentration() -> ExperimentConfig:
    return _experiment(
        "subset-concentration",
        StageConfig(name="gnp", kind=StageKind.GENERATE, family=GenFamily.GNP, n=2000, p=0.5),
        StageConfig(
            name="random-halves",
            kind=StageKind.CONCENTRATION,
            alpha="1/2",
            trials=100,
            fit_tol=0.01,
            count=99,
        ),
    )


def reduced_structure() -> ExperimentConfig:
    return _experiment(
        "reduced-structure",
        StageConfig(
            name="planted",
            kind=StageKind.GENERATE,
            family=GenFamily.PLANTED_STRUCTURE,
            t=8,
            m=100,
            s=5,
            x=0.25,
            y=0.36,
        ),
        StageConfig(name="regular-pair", kind=StageKind.REGULARITY, i=0, j=5, epsilon=0.25, trials=50, tol=0.25),
        StageConfig(name="factor-structure", kind=StageKind.FACTOR_STRUCTURE, epsilon=0.25, trials=50, fit_tol=0.03),
    )


PRESETS: dict[str, Callable[[], ExperimentConfig]] = {
    "oracle-equivalence": oracle_equivalence,
    "gottlieb-sweep": gottlieb_sweep,
    "crossing-rank-sweep": crossing_rank_sweep,
    "theorem-1-2-separation": half_split_separation,
    "half-split-separation": half_split_separation,
    "clique-cut-forward": clique_cut_forward,
    "swap-calculus": swap_calculus,
    "structure-classifier": structure_classifier,
    "substitution-identities": substitution_identities,
    "distance-to-w": distance_to_w,
    "hajnal-szemeredi": hajnal_szemeredi,
    "subset-concentration": subset_concentration,
    "reduced-structure": reduced_structure,
}


def get_preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]()
    except KeyError as e:
        known = ", ".join(sorted(PRESETS))
        raise QuasicutConfigurationError(f"Unknown preset `{name}`; known presets: {known}") from e
