from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from quasicut.core.configuration import get_toolkit_config
from quasicut.core.errors import QuasicutBudgetError, QuasicutValidationError
from quasicut.core.logging import get_logger
from quasicut.graphs.graph import Graph, PartitionStats, iter_bits
from quasicut.structure.classifier import StructureVerdict, VerdictTag, classify_structure

_logcore = get_logger(__name__)

_MAX_FACTOR_VERTICES = 32


class FactorStatus(StrEnum):
    FOUND = "found"
    NONE = "none"
    BUDGET_EXCEEDED = "budget_exceeded"


@dataclass(frozen=True, kw_only=True)
class CliqueFactor:
    status: FactorStatus
    k: int
    cliques: tuple[tuple[int, ...], ...]
    nodes: int

    @property
    def found(self) -> bool:
        return self.status == FactorStatus.FOUND

    def to_dict(self) -> dict[str, object]:
        return {
            "status": str(self.status),
            "k": self.k,
            "cliques": [list(clique) for clique in self.cliques],
            "nodes": self.nodes,
        }


class _OutOfNodesError(Exception): ...


def _cliques_through(g: Graph, candidates: int, size: int) -> Iterator[tuple[int, ...]]:
    """``size``-cliques inside ``candidates``, in lexicographic order."""
    if size == 0:
        yield ()
        return

    for w in iter_bits(candidates):
        higher = candidates & ~((2 << w) - 1)
        if higher.bit_count() < size - 1:
            return

        for rest in _cliques_through(g, higher & g.rows[w], size - 1):
            yield (w, *rest)


def clique_factor(g: Graph, k: int, *, node_budget: int | None = None) -> CliqueFactor:
    """Exact search for ``n/k`` vertex-disjoint ``k``-cliques covering every vertex.

    The lowest uncovered vertex is always covered next, so each factor is visited at most once.
    """
    if k < 1:
        raise QuasicutValidationError(f"Clique size must be positive, got {k}")

    if g.n % k != 0:
        raise QuasicutValidationError(f"A K{k}-factor needs k to divide n, got n={g.n}")

    if g.n > _MAX_FACTOR_VERTICES:
        raise QuasicutBudgetError("Clique factor search vertices", count=g.n, budget=_MAX_FACTOR_VERTICES)

    budget = get_toolkit_config().factor_node_budget if node_budget is None else node_budget
    chosen: list[tuple[int, ...]] = []
    nodes = 0

    def search(uncovered: int) -> bool:
        nonlocal nodes
        if uncovered == 0:
            return True

        nodes += 1
        if nodes > budget:
            raise _OutOfNodesError

        if any((g.rows[v] & uncovered).bit_count() < k - 1 for v in iter_bits(uncovered)):
            return False

        v = (uncovered & -uncovered).bit_length() - 1
        for rest in _cliques_through(g, g.rows[v] & uncovered, k - 1):
            clique = (v, *rest)
            chosen.append(clique)
            if search(uncovered & ~sum(1 << u for u in clique)):
                return True
            chosen.pop()

        return False

    try:
        status = FactorStatus.FOUND if search(g.full_mask) else FactorStatus.NONE
    except _OutOfNodesError:
        status = FactorStatus.BUDGET_EXCEEDED

    _logcore.debug(
        "K{k}-factor search on {n} vertices: {status} after {nodes} nodes",
        k=k,
        n=g.n,
        status=status,
        nodes=nodes,
    )
    return CliqueFactor(
        status=status,
        k=k,
        cliques=tuple(chosen) if status == FactorStatus.FOUND else (),
        nodes=nodes,
    )


@dataclass(frozen=True, kw_only=True)
class FactorStructure:
    """Classification of every 4-clique of a K4-factor of the reduced graph."""

    factor: CliqueFactor
    verdicts: tuple[StructureVerdict, ...]
    consensus_density: float | None
    density_floor: float
    min_pair_density: float

    @property
    def special_cliques(self) -> int:
        return sum(1 for verdict in self.verdicts if verdict.tag == VerdictTag.SPECIAL_VERTEX)

    @property
    def unstructured_cliques(self) -> int:
        return sum(1 for verdict in self.verdicts if verdict.tag == VerdictTag.UNSTRUCTURED)

    def to_dict(self) -> dict[str, object]:
        return {
            "factor": self.factor.to_dict(),
            "verdicts": [verdict.to_dict() for verdict in self.verdicts],
            "special_cliques": self.special_cliques,
            "unstructured_cliques": self.unstructured_cliques,
            "consensus_density": self.consensus_density,
            "density_floor": self.density_floor,
            "min_pair_density": self.min_pair_density,
        }


def _restrict(stats: PartitionStats, indices: tuple[int, ...]) -> PartitionStats:
    index = list(indices)
    return PartitionStats.from_targets(stats.x[index], stats.d[np.ix_(index, index)], m=stats.m)


def factor_structure(stats: PartitionStats, reduced: Graph, tol: float) -> FactorStructure:
    """Cover the reduced graph by 4-cliques and classify the density profile on each of them.

    The consensus density is the median of the pair densities that no special part touches.
    """
    if reduced.n != stats.t:
        raise QuasicutValidationError(f"Reduced graph has {reduced.n} vertices for {stats.t} parts")

    factor = clique_factor(reduced, 4)
    verdicts: list[StructureVerdict] = []
    background: list[float] = []
    for clique in factor.cliques:
        local = _restrict(stats, clique)
        verdict = classify_structure(local, tol)
        verdicts.append(verdict)

        if verdict.tag == VerdictTag.UNSTRUCTURED:
            continue

        skip = verdict.s if verdict.tag == VerdictTag.SPECIAL_VERTEX else None
        background.extend(
            float(local.d[a, b]) for a in range(4) for b in range(a + 1, 4) if skip not in (a, b)
        )

    floor = get_toolkit_config().density_floor(float(np.mean(stats.pair_densities())) if stats.t > 1 else 0.0)
    return FactorStructure(
        factor=factor,
        verdicts=tuple(verdicts),
        consensus_density=float(np.median(background)) if background else None,
        density_floor=floor,
        min_pair_density=stats.min_pair_density(),
    )
