from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from quasicut.core.errors import QuasicutValidationError
from quasicut.core.logging import get_logger
from quasicut.core.utils import make_rng
from quasicut.graphs.counting import clique_density_vector
from quasicut.graphs.graph import Graph, PartitionStats
from quasicut.linalg.density_space import DensityVectorK
from quasicut.structure.residuals import clique_pair_residual

_logcore = get_logger(__name__)


@dataclass(frozen=True, kw_only=True)
class SwapOutcome:
    """Density vectors of a two-part swap at ``0``, ``alpha`` and ``1``.

    ``d_one`` is the fully exchanged partition. ``d_prime`` is ``d_alpha - (1 - a) d_zero - a d_one`` with
    ``a = realized_alpha``, the fraction actually moved.
    """

    pair: tuple[int, int]
    k: int
    alpha: float
    realized_alpha: float
    moved_from_first: tuple[int, ...]
    moved_from_second: tuple[int, ...]
    d_zero: DensityVectorK
    d_alpha: DensityVectorK
    d_one: DensityVectorK
    d_prime: DensityVectorK

    def to_dict(self) -> dict[str, object]:
        return {
            "pair": list(self.pair),
            "k": self.k,
            "alpha": self.alpha,
            "realized_alpha": self.realized_alpha,
            "moved_from_first": list(self.moved_from_first),
            "moved_from_second": list(self.moved_from_second),
            "d_zero": self.d_zero.to_dict(),
            "d_alpha": self.d_alpha.to_dict(),
            "d_one": self.d_one.to_dict(),
            "d_prime": self.d_prime.to_dict(),
        }


def swap_experiment(
    g: Graph,
    parts: Sequence[Iterable[int]],
    i: int,
    j: int,
    alpha: float,
    seed: int,
    *,
    k: int = 3,
) -> SwapOutcome:
    """Exchange a random ``alpha`` fraction of part ``i`` with one of part ``j`` and measure the density response.

    The moved subsets are drawn once and shared by the three evaluations.
    """
    parts = [sorted(part) for part in parts]
    t = len(parts)
    if not (0 <= i < t and 0 <= j < t and i != j):
        raise QuasicutValidationError(f"Swap needs two distinct parts among {t}, got ({i}, {j})")

    if not 0 <= alpha <= 1:
        raise QuasicutValidationError(f"Swap fraction must lie in [0, 1], got {alpha}")

    m = len(parts[i])
    if any(len(part) != m for part in parts):
        raise QuasicutValidationError("Swap experiments need an equipartition")

    moved = math.floor(alpha * m)
    if alpha > 0 and moved < 1:
        raise QuasicutValidationError(f"alpha * m = {alpha * m} moves no vertex")

    if not 2 <= k <= t:
        raise QuasicutValidationError(f"Density vectors need 2 <= k <= {t}, got {k}")

    rng = make_rng(seed)
    from_i = tuple(sorted(int(v) for v in rng.choice(parts[i], size=moved, replace=False)))
    from_j = tuple(sorted(int(v) for v in rng.choice(parts[j], size=moved, replace=False)))

    swapped = list(parts)
    swapped[i] = sorted((set(parts[i]) - set(from_i)) | set(from_j))
    swapped[j] = sorted((set(parts[j]) - set(from_j)) | set(from_i))

    exchanged = list(parts)
    exchanged[i], exchanged[j] = parts[j], parts[i]

    d_zero = clique_density_vector(g, parts, k)
    d_alpha = clique_density_vector(g, swapped, k)
    d_one = clique_density_vector(g, exchanged, k)

    realized = moved / m
    d_prime = DensityVectorK(t, k, d_alpha.values - (1 - realized) * d_zero.values - realized * d_one.values)
    _logcore.debug(
        "Swapped {moved} of {m} vertices between parts {i} and {j}; max |d'| = {peak:.5f}",
        moved=moved,
        m=m,
        i=i,
        j=j,
        peak=float(np.max(np.abs(d_prime.values))),
    )

    return SwapOutcome(
        pair=(i, j),
        k=k,
        alpha=alpha,
        realized_alpha=realized,
        moved_from_first=from_i,
        moved_from_second=from_j,
        d_zero=d_zero,
        d_alpha=d_alpha,
        d_one=d_one,
        d_prime=d_prime,
    )


def predicted_d12k(x1: float, x2: float, d12: float, d1k: float, d2k: float, alpha: float) -> float:
    """Triangle density of the swapped triple ``(1', 2', k)`` in a regular setting."""
    return ((1 - alpha) ** 2 + alpha**2) * d12 * d1k * d2k + alpha * (1 - alpha) * (x1 * d1k**2 + x2 * d2k**2)


def predicted_d_prime(stats: PartitionStats, subset: Iterable[int], i: int, j: int, alpha: float) -> float:
    """Predicted nonlinear swap response of ``subset``, zero unless it contains both ``i`` and ``j``."""
    subset = tuple(sorted(subset))
    if i not in subset or j not in subset:
        return 0.0

    return alpha * (1 - alpha) * clique_pair_residual(stats, subset, i, j)


def predicted_d_prime_vector(stats: PartitionStats, k: int, i: int, j: int, alpha: float) -> DensityVectorK:
    empty = DensityVectorK.constant(stats.t, k, 0.0)
    values = np.array([predicted_d_prime(stats, label, i, j, alpha) for label in empty.labels])
    return DensityVectorK(stats.t, k, values)
