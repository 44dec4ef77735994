from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum


class PropertyTag(StrEnum):
    P1 = "p1"
    P2 = "p2"
    P3 = "p3"
    CUT_GRAPH = "cut_graph"
    CUT_HYPERGRAPH = "cut_hypergraph"
    CLIQUE_CUT = "clique_cut"
    HYPERGRAPH_P1 = "hypergraph_p1"
    REGULARITY = "regularity"


class CheckMode(StrEnum):
    EXHAUSTIVE = "exhaustive"
    SAMPLED = "sampled"
    CLOSED_FORM = "closed_form"


class WitnessKind(StrEnum):
    SUBSET = "subset"
    CUT = "cut"
    PAIR = "pair"
    WHOLE = "whole"


@dataclass(frozen=True, kw_only=True)
class Witness:
    """What achieved a reported deviation: a vertex subset, a cut (as part labels), a subset pair, or the input."""

    kind: WitnessKind
    vertices: tuple[int, ...] = ()
    other: tuple[int, ...] = ()
    labels: tuple[int, ...] = ()

    def to_dict(self) -> dict[str, object]:
        data: dict[str, object] = {"kind": str(self.kind)}
        if self.kind in {WitnessKind.SUBSET, WitnessKind.PAIR}:
            data["vertices"] = list(self.vertices)
        if self.kind == WitnessKind.PAIR:
            data["other"] = list(self.other)
        if self.kind == WitnessKind.CUT:
            data["labels"] = list(self.labels)
        return data

    @staticmethod
    def from_dict(data: dict[str, object]) -> Witness:
        return Witness(
            kind=WitnessKind(str(data["kind"])),
            vertices=tuple(data.get("vertices", ())),  # type: ignore[arg-type]
            other=tuple(data.get("other", ())),  # type: ignore[arg-type]
            labels=tuple(data.get("labels", ())),  # type: ignore[arg-type]
        )


@dataclass(frozen=True, kw_only=True)
class DeviationReport:
    """Measured deviation of an input from a quasi-random property.

    ``max_abs_deviation`` is normalized by ``n ** normalization_exponent``. Sampled reports are lower bounds on
    the true maximum over all subsets or cuts.
    """

    property: PropertyTag
    p: float
    n: int
    normalization_exponent: int
    mode: CheckMode
    samples: int
    max_abs_deviation: float
    witness: Witness
    seed: int | None = None
    parameters: dict[str, object] = field(default_factory=dict)
    components: dict[str, float] = field(default_factory=dict)
    flags: tuple[str, ...] = ()

    def passes_at_most(self, tolerance: float) -> bool:
        return self.max_abs_deviation <= tolerance

    def passes_at_least(self, threshold: float) -> bool:
        return self.max_abs_deviation >= threshold

    def to_dict(self) -> dict[str, object]:
        return {
            "property": str(self.property),
            "p": self.p,
            "n": self.n,
            "normalization_exponent": self.normalization_exponent,
            "mode": str(self.mode),
            "samples": self.samples,
            "max_abs_deviation": self.max_abs_deviation,
            "witness": self.witness.to_dict(),
            "seed": self.seed,
            "parameters": self.parameters,
            "components": self.components,
            "flags": list(self.flags),
        }

    @staticmethod
    def from_dict(data: dict[str, object]) -> DeviationReport:
        components: dict[str, object] = dict(data.get("components", {}))  # type: ignore[call-overload]
        return DeviationReport(
            property=PropertyTag(str(data["property"])),
            p=float(data["p"]),  # type: ignore[arg-type]
            n=int(data["n"]),  # type: ignore[call-overload]
            normalization_exponent=int(data["normalization_exponent"]),  # type: ignore[call-overload]
            mode=CheckMode(str(data["mode"])),
            samples=int(data["samples"]),  # type: ignore[call-overload]
            max_abs_deviation=float(data["max_abs_deviation"]),  # type: ignore[arg-type]
            witness=Witness.from_dict(data["witness"]),  # type: ignore[arg-type]
            seed=data.get("seed"),  # type: ignore[arg-type]
            parameters=dict(data.get("parameters", {})),  # type: ignore[call-overload]
            components={key: float(value) for key, value in components.items()},  # type: ignore[arg-type]
            flags=tuple(data.get("flags", ())),  # type: ignore[arg-type]
        )


@dataclass(frozen=True, kw_only=True)
class ConcentrationReport:
    """Random vertex subsets drawn with inclusion probability ``alpha`` against the expected edge count."""

    n: int
    alpha: float
    density: float
    trials: int
    tolerance: float
    deviations: tuple[float, ...]
    seed: int

    @property
    def passed(self) -> int:
        return sum(1 for deviation in self.deviations if deviation <= self.tolerance)

    def to_dict(self) -> dict[str, object]:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "density": self.density,
            "trials": self.trials,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "max_deviation": max(self.deviations, default=0.0),
            "deviations": list(self.deviations),
            "seed": self.seed,
        }
