from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from quasicut.core.errors import QuasicutValidationError
from quasicut.graphs.graph import PartitionStats


def triple_residual(x_i: float, x_j: float, d_ij: float, d_ik: float, d_jk: float) -> float:
    return x_i * d_ik**2 + x_j * d_jk**2 - 2 * d_ij * d_ik * d_jk


def oriented_residual(stats: PartitionStats, i: int, j: int, k: int) -> float:
    """Residual of the triple ``(i, j, k)`` with ``k`` as the untouched part."""
    d = stats.d
    return triple_residual(float(stats.x[i]), float(stats.x[j]), float(d[i, j]), float(d[i, k]), float(d[j, k]))


@dataclass(frozen=True, kw_only=True)
class ResidualSummary:
    max_abs: float
    mean_abs: float
    worst_triple: tuple[int, int, int]
    triples: int

    def to_dict(self) -> dict[str, object]:
        return {
            "max_abs": self.max_abs,
            "mean_abs": self.mean_abs,
            "worst_triple": list(self.worst_triple),
            "triples": self.triples,
        }


def residual_matrix(stats: PartitionStats) -> ResidualSummary:
    """Max and mean over all part triples of the largest absolute residual among the triple's three orientations.

    ``worst_triple`` lists the two swapped parts first and the untouched part last.
    """
    if stats.t < 3:
        raise QuasicutValidationError(f"Triple residuals need at least 3 parts, got {stats.t}")

    per_triple: list[float] = []
    worst = (-1.0, (0, 1, 2))
    for a, b, c in combinations(range(stats.t), 3):
        oriented = [((a, b, c), oriented_residual(stats, a, b, c))]
        oriented.append(((a, c, b), oriented_residual(stats, a, c, b)))
        oriented.append(((b, c, a), oriented_residual(stats, b, c, a)))

        largest = max(abs(value) for _, value in oriented)
        per_triple.append(largest)
        if largest > worst[0]:
            worst = (largest, next(triple for triple, value in oriented if abs(value) == largest))

    return ResidualSummary(
        max_abs=worst[0],
        mean_abs=math.fsum(per_triple) / len(per_triple),
        worst_triple=worst[1],
        triples=len(per_triple),
    )


def _product(values: Iterable[float]) -> float:
    return math.prod(values)


def _pairs_product(stats: PartitionStats, indices: Sequence[int]) -> float:
    return _product(float(stats.d[a, b]) for a, b in combinations(indices, 2))


def _check_positive(stats: PartitionStats, indices: Iterable[int]) -> None:
    indices = sorted(set(indices))
    for a, b in combinations(indices, 2):
        if stats.d[a, b] <= 0:
            raise QuasicutValidationError(f"Substitution needs positive densities, d[{a},{b}] = {stats.d[a, b]}")


@dataclass(frozen=True, kw_only=True)
class TransformedDensities:
    """Pair and within-part densities after absorbing the parts ``base`` into every remaining index."""

    base: tuple[int, ...]
    x: dict[int, float]
    d: dict[tuple[int, int], float]

    def pair(self, a: int, b: int) -> float:
        return self.d[(min(a, b), max(a, b))]


def transform_densities(stats: PartitionStats, base: Iterable[int], indices: Iterable[int]) -> TransformedDensities:
    base = tuple(sorted(base))
    indices = tuple(sorted(indices))
    if set(base) & set(indices):
        raise QuasicutValidationError(f"Absorbed parts {base} overlap the transformed indices {indices}")

    if len(set(indices)) != len(indices):
        raise QuasicutValidationError(f"Transformed indices must be distinct, got {indices}")

    _check_positive(stats, (*base, *indices))
    inner = _pairs_product(stats, base) ** (1 / 3)

    def attached(j: int) -> float:
        return _product(float(stats.d[a, j]) for a in base)

    x = {j: float(stats.x[j]) * attached(j) * inner for j in indices}
    d = {
        (j1, j2): float(stats.d[j1, j2]) * math.sqrt(attached(j1)) * math.sqrt(attached(j2)) * inner
        for j1, j2 in combinations(indices, 2)
    }
    return TransformedDensities(base=base, x=x, d=d)


def general_triple_residual(stats: PartitionStats, base: Iterable[int], j1: int, j2: int, j3: int) -> float:
    """Triple residual of ``(j1, j2, j3)`` computed on densities transformed by the absorbed parts ``base``."""
    transformed = transform_densities(stats, base, (j1, j2, j3))
    return triple_residual(
        transformed.x[j1],
        transformed.x[j2],
        transformed.pair(j1, j2),
        transformed.pair(j1, j3),
        transformed.pair(j2, j3),
    )


def clique_pair_residual(stats: PartitionStats, subset: Iterable[int], j1: int, j2: int) -> float:
    """Residual of the ``k``-subset ``subset`` when ``j1`` and ``j2`` are swapped, in untransformed densities."""
    subset = tuple(sorted(subset))
    if j1 == j2 or j1 not in subset or j2 not in subset:
        raise QuasicutValidationError(f"Parts {j1} and {j2} must be two distinct members of {subset}")

    rest = [a for a in subset if a not in (j1, j2)]
    inner = _pairs_product(stats, rest)

    def side(j: int) -> float:
        return float(stats.x[j]) * _product(float(stats.d[a, j]) for a in rest) ** 2 * inner

    return side(j1) + side(j2) - 2 * _pairs_product(stats, subset)


@dataclass(frozen=True, kw_only=True)
class SubstitutionCheck:
    cycle_lhs: float
    cycle_rhs: float
    side_lhs: float
    side_rhs: float

    @staticmethod
    def _relative(lhs: float, rhs: float) -> float:
        scale = max(abs(lhs), abs(rhs))
        return abs(lhs - rhs) / scale if scale > 0 else 0.0

    @property
    def cycle_error(self) -> float:
        return self._relative(self.cycle_lhs, self.cycle_rhs)

    @property
    def side_error(self) -> float:
        return self._relative(self.side_lhs, self.side_rhs)


def substitution_check(stats: PartitionStats, base: Iterable[int], j1: int, j2: int, j3: int) -> SubstitutionCheck:
    """Both sides of the two identities that reduce a ``k``-subset residual to a transformed triangle residual.

    The transformed triangle product must equal the product of all pair densities of ``base + {j1, j2, j3}``, and
    ``x_j1 (d_j1j3)^2`` in transformed form must equal the untransformed side term with ``base + {j3}`` as the rest.
    """
    base = tuple(sorted(base))
    transformed = transform_densities(stats, base, (j1, j2, j3))
    subset = (*base, j1, j2, j3)
    rest = (*base, j3)

    side_rhs = (
        float(stats.x[j1])
        * _product(float(stats.d[a, j1]) for a in rest) ** 2
        * _pairs_product(stats, rest)
    )
    return SubstitutionCheck(
        cycle_lhs=transformed.pair(j1, j2) * transformed.pair(j2, j3) * transformed.pair(j1, j3),
        cycle_rhs=_pairs_product(stats, subset),
        side_lhs=transformed.x[j1] * transformed.pair(j1, j3) ** 2,
        side_rhs=side_rhs,
    )


def implied_within_densities(d12: float, d13: float, d23: float) -> tuple[float, float, float]:
    """Within-part densities solving the three residual equations of a three-part system.

    Each part in turn is left untouched, which gives three linear equations in ``x1, x2, x3`` with a unique
    solution whenever all pair densities are positive.
    """
    if min(d12, d13, d23) <= 0:
        raise QuasicutValidationError("Implied within densities need positive pair densities")

    system = np.array(
        [
            [d13**2, d23**2, 0.0],
            [d12**2, 0.0, d23**2],
            [0.0, d12**2, d13**2],
        ],
    )
    rhs = np.full(3, 2 * d12 * d13 * d23)
    x1, x2, x3 = np.linalg.solve(system, rhs)
    return float(x1), float(x2), float(x3)
