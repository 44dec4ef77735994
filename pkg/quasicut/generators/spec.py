from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

from serde import serde
from serde.yaml import from_yaml, to_yaml

from quasicut.core.errors import QuasicutConfigurationError, QuasicutValidationError


class GenFamily(StrEnum):
    GNP = "gnp"
    HALF_SPLIT = "half_split"
    PLANTED_STRUCTURE = "planted_structure"
    TRIPARTITE = "tripartite"
    COMPLETE = "complete"
    EMPTY = "empty"
    MIN_DEGREE = "min_degree"
    COMPLETE_HYPERGRAPH = "complete_hypergraph"


@serde
@dataclass(frozen=True, kw_only=True)
class GenSpec:
    """Flat description of one generated input.

    Only the fields used by ``family`` need to be set: ``n`` and ``p`` for the random graph models,
    ``t``/``m``/``s``/``x``/``y`` for the planted structure, ``m`` and the three pair densities for the tripartite
    model, ``n``/``min_degree`` and ``n``/``k`` for the remaining families.
    """

    family: GenFamily
    seed: int = 0
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

    def require(self, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise QuasicutValidationError(f"Generator `{self.family}` needs parameters: {', '.join(missing)}")

        for name in ("p", "d12", "d13", "d23"):
            value = getattr(self, name)
            if value is not None and not 0 <= value <= 1:
                raise QuasicutValidationError(f"Parameter {name}={value} is not a probability")

    def to_yaml(self) -> str:
        return to_yaml(self)

    @staticmethod
    def from_yaml(text: str) -> GenSpec:
        try:
            spec = from_yaml(GenSpec, text)
        except Exception as e:
            raise QuasicutConfigurationError(f"Invalid generator specification: {e}") from e

        return spec
