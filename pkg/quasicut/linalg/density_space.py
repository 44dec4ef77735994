from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from quasicut.core.errors import QuasicutBudgetError, QuasicutInternalError, QuasicutValidationError
from quasicut.core.logging import get_logger
from quasicut.linalg.families import colex_index, colex_subsets

_logcore = get_logger(__name__)

_MAX_GENERATOR_PARTS = 16


@dataclass(frozen=True)
class DensityVectorK:
    """Real vector indexed by the ``k``-subsets of ``0..t-1`` in colexicographic order."""

    t: int
    k: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        expected = math.comb(self.t, self.k)
        if self.values.shape != (expected,):
            raise QuasicutValidationError(
                f"A density vector over {self.k}-subsets of {self.t} parts has {expected} entries, "
                f"got shape {self.values.shape}",
            )

    @staticmethod
    def constant(t: int, k: int, value: float) -> DensityVectorK:
        return DensityVectorK(t, k, np.full(math.comb(t, k), float(value)))

    @staticmethod
    def from_mapping(t: int, k: int, mapping: dict[tuple[int, ...], float]) -> DensityVectorK:
        values = np.zeros(math.comb(t, k))
        for subset, value in mapping.items():
            values[colex_index(sorted(subset))] = value

        return DensityVectorK(t, k, values)

    @property
    def labels(self) -> tuple[tuple[int, ...], ...]:
        return colex_subsets(self.t, self.k)

    def __getitem__(self, subset: Iterable[int]) -> float:
        return float(self.values[colex_index(sorted(subset))])

    def items(self) -> list[tuple[tuple[int, ...], float]]:
        return [(label, float(value)) for label, value in zip(self.labels, self.values, strict=True)]

    def to_dict(self) -> dict[str, object]:
        return {
            "t": self.t,
            "k": self.k,
            "values": {",".join(str(i) for i in label): value for label, value in self.items()},
        }


def u_vector(t: int, k: int, p: float, half: Sequence[int]) -> DensityVectorK:
    """Weighted hypergraph profile where a ``k``-subset ``e`` has weight ``2p|e & half|/k``."""
    if t % 2 != 0:
        raise QuasicutValidationError(f"Generator vectors need an even number of parts, got {t}")

    chosen = set(half)
    if len(chosen) != t // 2 or len(chosen) != len(half):
        raise QuasicutValidationError(f"Generator subset must have exactly {t // 2} distinct parts, got {tuple(half)}")

    if any(not 0 <= i < t for i in chosen):
        raise QuasicutValidationError(f"Generator subset {tuple(half)} is not inside 0..{t - 1}")

    values = np.array([2 * p * len(chosen.intersection(e)) / k for e in colex_subsets(t, k)])
    return DensityVectorK(t, k, values)


@dataclass(frozen=True, kw_only=True)
class WDistance:
    l2_residual: float
    linf_residual: float
    coefficients: tuple[float, ...]
    generators: tuple[tuple[int, ...], ...] = field(repr=False)
    linf_optimal: float | None = None

    def to_dict(self) -> dict[str, object]:
        return {
            "l2_residual": self.l2_residual,
            "linf_residual": self.linf_residual,
            "linf_optimal": self.linf_optimal,
            "coefficients": {",".join(map(str, g)): c for g, c in zip(self.generators, self.coefficients, strict=True)},
        }


def generator_matrix(t: int, k: int, p: float) -> tuple[np.ndarray, tuple[tuple[int, ...], ...]]:
    if t > _MAX_GENERATOR_PARTS:
        raise QuasicutBudgetError(
            f"Generator vectors for {t} parts",
            count=math.comb(t, t // 2),
            budget=math.comb(_MAX_GENERATOR_PARTS, _MAX_GENERATOR_PARTS // 2),
        )

    halves = colex_subsets(t, t // 2)
    columns = np.column_stack([u_vector(t, k, p, half).values for half in halves])
    return columns, halves


def distance_to_W(d: DensityVectorK, p: float, *, exact_linf: bool = False) -> WDistance:  # noqa: N802
    """Distance from ``d`` to the affine hull of the generator vectors for ``(t, k, p)``.

    The least-squares point is a member of the hull, so its sup-norm residual bounds the optimum from above.
    ``exact_linf`` additionally solves the sup-norm problem as a linear program.
    """
    generators, halves = generator_matrix(d.t, d.k, p)
    base = generators[:, 0]
    directions = generators[:, 1:] - base[:, None]

    if directions.shape[1] > 0:
        solution, *_ = np.linalg.lstsq(directions, d.values - base, rcond=None)
    else:
        solution = np.zeros(0)

    coefficients = np.concatenate(([1.0 - solution.sum()], solution))
    residual = d.values - generators @ coefficients

    linf_optimal = _linf_distance(generators, d.values) if exact_linf else None

    result = WDistance(
        l2_residual=float(np.linalg.norm(residual)),
        linf_residual=float(np.max(np.abs(residual))) if residual.size else 0.0,
        coefficients=tuple(float(c) for c in coefficients),
        generators=halves,
        linf_optimal=linf_optimal,
    )
    _logcore.debug(
        "Distance to W for t={t}, k={k}, p={p}: l2={l2}, linf={linf}",
        t=d.t,
        k=d.k,
        p=p,
        l2=result.l2_residual,
        linf=result.linf_residual,
    )
    return result


def _linf_distance(generators: np.ndarray, target: np.ndarray) -> float:
    rows, count = generators.shape
    # variables: one coefficient per generator, then the bound s
    objective = np.zeros(count + 1)
    objective[-1] = 1.0

    slack = -np.ones((rows, 1))
    upper = np.vstack([np.hstack([generators, slack]), np.hstack([-generators, slack])])
    upper_bounds = np.concatenate([target, -target])
    equality = np.concatenate([np.ones(count), [0.0]])[None, :]

    result = linprog(
        objective,
        A_ub=upper,
        b_ub=upper_bounds,
        A_eq=equality,
        b_eq=[1.0],
        bounds=[(None, None)] * count + [(0, None)],
        method="highs",
    )
    if not result.success:
        raise QuasicutInternalError(f"Sup-norm projection did not converge: {result.message}")

    return float(result.x[-1])
