from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum

from serde import serde
from serde.yaml import from_yaml, to_yaml

from quasicut.core.errors import QuasicutConfigurationError
from quasicut.generators.spec import GenFamily, GenSpec


class StageKind(StrEnum):
    GENERATE = "generate"
    CHECK = "check"
    CONCENTRATION = "concentration"
    REGULARITY = "regularity"
    REDUCED_GRAPH = "reduced_graph"
    SWAP = "swap"
    RESIDUALS = "residuals"
    CLASSIFY = "classify"
    EXCELLENT = "excellent"
    FACTOR = "factor"
    FACTOR_STRUCTURE = "factor_structure"
    DISTANCE = "distance"
    MATRIX_RANK = "matrix_rank"
    ORACLE_BATTERY = "oracle_battery"
    INCLUSION_RANK_SWEEP = "inclusion_rank_sweep"
    CROSSING_RANK_SWEEP = "crossing_rank_sweep"
    CLASSIFIER_BATTERY = "classifier_battery"
    SUBSTITUTION_BATTERY = "substitution_battery"
    MEMBERSHIP_BATTERY = "membership_battery"
    FACTOR_BATTERY = "factor_battery"


@serde
@dataclass(frozen=True, kw_only=True)
class StageConfig:
    """One flat pipeline stage.

    ``tol`` is an upper gate and ``min_deviation`` a lower gate on the stage's headline number; a stage without
    gates passes unless its own criterion fails (a battery case, an expected verdict, a missing factor).
    ``fit_tol`` is the tolerance used inside an analysis (template fits, excellent tuples, battery cases).

    Generator fields (``family`` and the model parameters) are read by ``generate`` stages. Analysis stages read
    ``t`` as the number of consecutive equal parts to use instead of the input's own parts, and with ``targets``
    set they analyze the exact planted densities for ``t``, ``s``, ``x``, ``y`` instead of the input.
    """

    name: str
    kind: StageKind
    seed: int | None = None

    family: GenFamily | None = None
    n: int | None = None
    p: float | None = None
    t: int | None = None
    m: int | None = None
    s: int | None = None
    x: float | None = None
    y: float | None = None
    k: int | None = None
    d12: float | None = None
    d13: float | None = None
    d23: float | None = None
    min_degree: int | None = None

    property: str | None = None
    alpha: str | None = None
    lift_k: int | None = None
    budget: int | None = None
    trials: int | None = None
    epsilon: float | None = None
    i: int | None = None
    j: int | None = None
    r: int | None = None
    h: int | None = None
    matrix: str | None = None
    count: int | None = None
    t_max: int | None = None
    exact_linf: bool = False
    targets: bool = False
    fit_tol: float | None = None
    expect: str | None = None

    tol: float | None = None
    min_deviation: float | None = None

    def gen_spec(self, seed: int) -> GenSpec:
        if self.family is None:
            raise QuasicutConfigurationError(f"Stage `{self.name}` generates an input but names no family")

        return GenSpec(
            family=self.family,
            seed=seed,
            n=self.n,
            p=self.p,
            t=self.t,
            m=self.m,
            s=self.s,
            x=self.x,
            y=self.y,
            k=self.k,
            d12=self.d12,
            d13=self.d13,
            d23=self.d23,
            min_degree=self.min_degree,
        )


@serde
@dataclass(frozen=True, kw_only=True)
class ExperimentConfig:
    name: str
    master_seed: int = 0
    output_dir: str = "runs"
    stages: list[StageConfig] = field(default_factory=list)

    def to_yaml(self) -> str:
        return to_yaml(self)

    @staticmethod
    def from_yaml(text: str, source: str = "<config>") -> ExperimentConfig:
        try:
            config = from_yaml(ExperimentConfig, text)
        except Exception as e:
            raise QuasicutConfigurationError(f"Experiment configuration in {source} is not valid: {e}") from e

        names = [stage.name for stage in config.stages]
        duplicated = sorted({name for name in names if names.count(name) > 1})
        if duplicated:
            raise QuasicutConfigurationError(f"Stage names must be unique, repeated: {', '.join(duplicated)}")

        return config
