from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from quasicut.core.configuration import get_toolkit_config
from quasicut.core.errors import QuasicutBudgetError, QuasicutValidationError
from quasicut.core.logging import get_logger
from quasicut.graphs.graph import PartitionStats
from quasicut.structure.residuals import transform_densities

_logcore = get_logger(__name__)


@dataclass(frozen=True, kw_only=True)
class ExcellentAnalysis:
    k: int
    tolerance: float
    tuples_checked: int
    excellent_tuples: tuple[tuple[int, ...], ...]
    excellent_pairs: tuple[tuple[int, int], ...]
    pair_threshold: float
    fitted_levels: dict[tuple[int, ...], float]
    max_excellent_spread: float

    @property
    def excellent_fraction(self) -> float:
        return len(self.excellent_tuples) / self.tuples_checked if self.tuples_checked else 0.0

    def to_dict(self) -> dict[str, object]:
        return {
            "k": self.k,
            "tolerance": self.tolerance,
            "tuples_checked": self.tuples_checked,
            "excellent_fraction": self.excellent_fraction,
            "excellent_tuples": [list(j) for j in self.excellent_tuples],
            "excellent_pairs": [list(pair) for pair in self.excellent_pairs],
            "pair_threshold": self.pair_threshold,
            "fitted_levels": {",".join(map(str, base)): level for base, level in self.fitted_levels.items()},
            "max_excellent_spread": self.max_excellent_spread,
        }


def _is_excellent(stats: PartitionStats, subset: tuple[int, ...], k: int, tol: float) -> bool:
    for base in combinations(subset, k - 3):
        rest = [j for j in subset if j not in base]
        values = transform_densities(stats, base, rest).d.values()
        if max(values) - min(values) > tol:
            return False

    return True


def _pair_spread(stats: PartitionStats, subset: tuple[int, ...]) -> float:
    values = [float(stats.d[a, b]) for a, b in combinations(subset, 2)]
    return max(values) - min(values)


def excellent_analysis(stats: PartitionStats, k: int, tol: float) -> ExcellentAnalysis:
    """Mark ``k``-tuples whose transformed pair densities agree within ``tol`` for every absorbed ``(k-3)``-subset.

    A pair is excellent when at least two thirds of the ``C(t-2, k-2)`` tuples containing it are excellent.
    ``max_excellent_spread`` is the largest raw pair-density spread inside an excellent tuple.
    """
    if k < 3:
        raise QuasicutValidationError(f"Excellent tuples need k >= 3, got {k}")

    if stats.t < k:
        raise QuasicutValidationError(f"Cannot form {k}-tuples from {stats.t} parts")

    if stats.min_pair_density() <= 0:
        raise QuasicutValidationError("Excellent tuple analysis needs positive pair densities")

    total = math.comb(stats.t, k)
    budget = get_toolkit_config().enumeration_budget
    if total > budget:
        raise QuasicutBudgetError(f"{k}-tuples of {stats.t} parts", count=total, budget=budget)

    excellent = tuple(subset for subset in combinations(range(stats.t), k) if _is_excellent(stats, subset, k, tol))

    containing = np.zeros((stats.t, stats.t), dtype=np.int64)
    for subset in excellent:
        for a, b in combinations(subset, 2):
            containing[a, b] += 1

    threshold = 2 / 3 * math.comb(stats.t - 2, k - 2)
    pairs = tuple((a, b) for a, b in combinations(range(stats.t), 2) if containing[a, b] >= threshold)

    levels: dict[tuple[int, ...], float] = {}
    for base in combinations(range(stats.t), k - 3):
        rest = [j for j in range(stats.t) if j not in base]
        levels[base] = float(np.median(list(transform_densities(stats, base, rest).d.values())))

    spread = max((_pair_spread(stats, subset) for subset in excellent), default=0.0)
    _logcore.debug(
        "{excellent} of {total} {k}-tuples are excellent, {pairs} excellent pairs",
        excellent=len(excellent),
        total=total,
        k=k,
        pairs=len(pairs),
    )
    return ExcellentAnalysis(
        k=k,
        tolerance=tol,
        tuples_checked=total,
        excellent_tuples=excellent,
        excellent_pairs=pairs,
        pair_threshold=threshold,
        fitted_levels=levels,
        max_excellent_spread=spread,
    )
