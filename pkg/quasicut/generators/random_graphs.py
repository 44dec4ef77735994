from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from quasicut.core.errors import QuasicutInfeasibleError, QuasicutValidationError
from quasicut.core.logging import get_logger
from quasicut.core.parallel import ordered_map
from quasicut.core.utils import make_block_rng, make_rng
from quasicut.generators.spec import GenFamily, GenSpec
from quasicut.graphs.graph import Graph, UniformHypergraph

_logcore = get_logger(__name__)

_ROW_BLOCK = 256


@dataclass(frozen=True, kw_only=True)
class GeneratedInput:
    spec: GenSpec
    graph: Graph | None = None
    hypergraph: UniformHypergraph | None = None
    parts: tuple[tuple[int, ...], ...] = field(default=())

    def metadata(self) -> dict[str, object]:
        target = self.graph if self.graph is not None else self.hypergraph
        return {
            "family": str(self.spec.family),
            "parameters": {
                name: getattr(self.spec, name)
                for name in ("n", "p", "t", "m", "s", "x", "y", "k", "d12", "d13", "d23", "min_degree")
                if getattr(self.spec, name) is not None
            },
            "seed": self.spec.seed,
            "vertices": target.n if target is not None else 0,
            "edges": target.m if target is not None else 0,
            "part_boundaries": [[part[0], part[-1] + 1] for part in self.parts if part],
        }


def _sample_adjacency(probabilities: np.ndarray, seed: int) -> np.ndarray:
    """Symmetric boolean adjacency with independent pairs, pair ``(u, v)`` present with the given probability.

    Rows are drawn in fixed-size blocks from jumped streams, so the result does not depend on the worker count.
    """
    n = probabilities.shape[0]
    starts = list(range(0, n, _ROW_BLOCK))

    def sample(block: int) -> np.ndarray:
        start = starts[block]
        stop = min(start + _ROW_BLOCK, n)
        draws = make_block_rng(seed, block).random((stop - start, n))
        return draws < probabilities[start:stop]

    if n == 0:
        return np.zeros((0, 0), dtype=bool)

    upper = np.triu(np.vstack(ordered_map(sample, list(range(len(starts))))), k=1)
    return upper | upper.T


def _block_probabilities(part_of: np.ndarray, table: np.ndarray) -> np.ndarray:
    return table[np.ix_(part_of, part_of)]


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    if n < 1:
        raise QuasicutValidationError(f"G(n, p) needs n >= 1, got {n}")

    if not 0 <= p <= 1:
        raise QuasicutValidationError(f"Edge probability {p} is not in [0, 1]")

    return Graph.from_adjacency_matrix(_sample_adjacency(np.full((n, n), p), seed))


def gen_half_split(n: int, p: float, seed: int) -> Graph:
    """A random graph of density ``2p`` on the first half, an independent set on the second, density ``p`` across."""
    if n < 2 or n % 2 != 0:
        raise QuasicutValidationError(f"Half-split graphs need an even n >= 2, got {n}")

    if not 0 <= 2 * p <= 1:
        raise QuasicutValidationError(f"Half-split graphs need 0 <= 2p <= 1, got p={p}")

    part_of = np.repeat([0, 1], n // 2)
    table = np.array([[2 * p, p], [p, 0.0]])
    return Graph.from_adjacency_matrix(_sample_adjacency(_block_probabilities(part_of, table), seed))


def planted_targets(t: int, s: int, x: float, y: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact within-part and pair densities of the planted solution with special part ``s``."""
    check_planted_feasible(t, s, x, y)
    within = np.full(t, math.sqrt(x))
    within[s] = math.sqrt(x) * (2 * y - x) / y

    pairs = np.full((t, t), math.sqrt(x))
    pairs[s, :] = math.sqrt(y)
    pairs[:, s] = math.sqrt(y)
    np.fill_diagonal(pairs, 0.0)
    return within, pairs


def check_planted_feasible(t: int, s: int, x: float, y: float) -> None:
    if t < 1 or not 0 <= s < t:
        raise QuasicutValidationError(f"Special part {s} is not one of the {t} parts")

    if not x > 0:
        raise QuasicutInfeasibleError(f"Planted structure needs x > 0, got x={x}")

    if not y <= 1:
        raise QuasicutInfeasibleError(f"Planted structure needs y <= 1, got y={y}")

    if not x <= 2 * y:
        raise QuasicutInfeasibleError(f"Planted structure needs x <= 2y, got x={x}, y={y}")

    if not x <= 1:
        raise QuasicutInfeasibleError(f"Planted structure needs x <= 1, got x={x}")

    special = math.sqrt(x) * (2 * y - x) / y
    if special > 1:
        raise QuasicutInfeasibleError(f"Planted structure needs sqrt(x)(2y-x)/y <= 1, got {special:.6f}")


def gen_planted_structure(
    t: int,
    m: int,
    s: int,
    x: float,
    y: float,
    seed: int,
) -> tuple[Graph, tuple[tuple[int, ...], ...]]:
    """Block random graph realizing the planted solution; part ``i`` is vertices ``i*m .. (i+1)*m - 1``."""
    if m < 1:
        raise QuasicutValidationError(f"Part size must be positive, got {m}")

    check_planted_feasible(t, s, x, y)

    # the special part is sampled as block 0 and moved to position s afterwards
    within, pairs = planted_targets(t, 0, x, y)
    table = pairs + np.diag(within)
    part_of = np.repeat(np.arange(t), m)
    adjacency = _sample_adjacency(_block_probabilities(part_of, table), seed)

    part_order = [*range(1, s + 1), 0, *range(s + 1, t)]
    vertex_order = np.concatenate([np.arange(i * m, (i + 1) * m) for i in part_order])
    adjacency = adjacency[np.ix_(vertex_order, vertex_order)]

    parts = tuple(tuple(range(i * m, (i + 1) * m)) for i in range(t))
    return Graph.from_adjacency_matrix(adjacency), parts


def gen_tripartite(m: int, d12: float, d13: float, d23: float, seed: int) -> tuple[Graph, tuple[tuple[int, ...], ...]]:
    if m < 1:
        raise QuasicutValidationError(f"Part size must be positive, got {m}")

    for name, value in (("d12", d12), ("d13", d13), ("d23", d23)):
        if not 0 <= value <= 1:
            raise QuasicutValidationError(f"Density {name}={value} is not in [0, 1]")

    table = np.array([[0.0, d12, d13], [d12, 0.0, d23], [d13, d23, 0.0]])
    part_of = np.repeat(np.arange(3), m)
    graph = Graph.from_adjacency_matrix(_sample_adjacency(_block_probabilities(part_of, table), seed))
    return graph, tuple(tuple(range(i * m, (i + 1) * m)) for i in range(3))


def gen_min_degree(n: int, min_degree: int, seed: int) -> Graph:
    """Random graph with minimum degree at least ``min_degree``.

    A random graph of maximum degree ``n - 1 - min_degree`` is grown greedily over a shuffled pair order and
    complemented.
    """
    if not 0 <= min_degree <= n - 1:
        raise QuasicutValidationError(f"Minimum degree {min_degree} is impossible on {n} vertices")

    max_missing = n - 1 - min_degree
    pairs = list(combinations(range(n), 2))
    order = make_rng(seed).permutation(len(pairs))

    missing_degree = [0] * n
    missing: list[tuple[int, int]] = []
    for index in order:
        u, v = pairs[int(index)]
        if missing_degree[u] < max_missing and missing_degree[v] < max_missing:
            missing.append((u, v))
            missing_degree[u] += 1
            missing_degree[v] += 1

    return Graph.from_edges(n, missing).complement()


def gen_complete_hypergraph(n: int, k: int) -> UniformHypergraph:
    if k < 1 or n < 0:
        raise QuasicutValidationError(f"Complete hypergraph needs k >= 1 and n >= 0, got n={n}, k={k}")

    return UniformHypergraph(n, k, frozenset(combinations(range(n), k)))


def generate(spec: GenSpec) -> GeneratedInput:  # noqa: PLR0911
    _logcore.debug("Generating {family} with seed {seed}", family=spec.family, seed=spec.seed)

    match spec.family:
        case GenFamily.GNP:
            spec.require("n", "p")
            return GeneratedInput(spec=spec, graph=gen_gnp(spec.n, spec.p, spec.seed))  # type: ignore[arg-type]

        case GenFamily.HALF_SPLIT:
            spec.require("n", "p")
            graph = gen_half_split(spec.n, spec.p, spec.seed)  # type: ignore[arg-type]
            half = spec.n // 2  # type: ignore[operator]
            return GeneratedInput(
                spec=spec,
                graph=graph,
                parts=(tuple(range(half)), tuple(range(half, 2 * half))),
            )

        case GenFamily.PLANTED_STRUCTURE:
            spec.require("t", "m", "s", "x", "y")
            graph, parts = gen_planted_structure(
                spec.t,  # type: ignore[arg-type]
                spec.m,  # type: ignore[arg-type]
                spec.s,  # type: ignore[arg-type]
                spec.x,  # type: ignore[arg-type]
                spec.y,  # type: ignore[arg-type]
                spec.seed,
            )
            return GeneratedInput(spec=spec, graph=graph, parts=parts)

        case GenFamily.TRIPARTITE:
            spec.require("m", "d12", "d13", "d23")
            graph, parts = gen_tripartite(spec.m, spec.d12, spec.d13, spec.d23, spec.seed)  # type: ignore[arg-type]
            return GeneratedInput(spec=spec, graph=graph, parts=parts)

        case GenFamily.COMPLETE:
            spec.require("n")
            return GeneratedInput(spec=spec, graph=Graph.complete(spec.n))  # type: ignore[arg-type]

        case GenFamily.EMPTY:
            spec.require("n")
            return GeneratedInput(spec=spec, graph=Graph.empty(spec.n))  # type: ignore[arg-type]

        case GenFamily.MIN_DEGREE:
            spec.require("n", "min_degree")
            graph = gen_min_degree(spec.n, spec.min_degree, spec.seed)  # type: ignore[arg-type]
            return GeneratedInput(spec=spec, graph=graph)

        case GenFamily.COMPLETE_HYPERGRAPH:
            spec.require("n", "k")
            hypergraph = gen_complete_hypergraph(spec.n, spec.k)  # type: ignore[arg-type]
            return GeneratedInput(spec=spec, hypergraph=hypergraph)

    raise QuasicutValidationError(f"Unknown generator family `{spec.family}`")
