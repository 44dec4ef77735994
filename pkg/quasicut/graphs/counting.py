from __future__ import annotations

import math
from collections.abc import Iterable, Sequence

import numpy as np

from quasicut.core.errors import QuasicutValidationError
from quasicut.graphs.graph import Graph, PartitionStats, UniformHypergraph, VertexCut, iter_bits, mask_of
from quasicut.linalg.density_space import DensityVectorK
from quasicut.linalg.families import colex_subsets


def _as_mask(g: Graph, vertices: Iterable[int] | int) -> int:
    if isinstance(vertices, int):
        if vertices & ~g.full_mask:
            raise QuasicutValidationError("Vertex mask references vertices outside the graph")
        return vertices

    return mask_of(vertices, g.n)


def edges_within_mask(g: Graph, mask: int) -> int:
    return sum((g.rows[v] & mask).bit_count() for v in iter_bits(mask)) // 2


def edges_within(g: Graph, vertices: Iterable[int] | int) -> int:
    """Number of edges with both endpoints in ``vertices`` (a vertex collection or a bit-set)."""
    return edges_within_mask(g, _as_mask(g, vertices))


def edges_between(g: Graph, xs: Iterable[int] | int, ys: Iterable[int] | int) -> int:
    x_mask = _as_mask(g, xs)
    y_mask = _as_mask(g, ys)
    if x_mask & y_mask:
        raise QuasicutValidationError("Vertex sets must be disjoint to count edges between them")

    return sum((g.rows[v] & y_mask).bit_count() for v in iter_bits(x_mask))


def edge_density_between(g: Graph, xs: Iterable[int] | int, ys: Iterable[int] | int) -> float:
    x_mask = _as_mask(g, xs)
    y_mask = _as_mask(g, ys)
    size = x_mask.bit_count() * y_mask.bit_count()
    if size == 0:
        return 0.0

    return edges_between(g, x_mask, y_mask) / size


def _transversal_cliques(g: Graph, masks: Sequence[int], common: int = -1, index: int = 0) -> int:
    """Cliques with exactly one vertex in each of ``masks``."""
    if index == len(masks) - 1:
        return (masks[index] & common).bit_count()

    total = 0
    for v in iter_bits(masks[index] & common):
        total += _transversal_cliques(g, masks, common & g.rows[v], index + 1)

    return total


def triangles_between(g: Graph, xs: Iterable[int] | int, ys: Iterable[int] | int, zs: Iterable[int] | int) -> int:
    """Triangles with one vertex in each of three disjoint sets."""
    masks = [_as_mask(g, xs), _as_mask(g, ys), _as_mask(g, zs)]
    if masks[0] & masks[1] or masks[0] & masks[2] or masks[1] & masks[2]:
        raise QuasicutValidationError("Vertex sets must be pairwise disjoint to count triangles between them")

    return _transversal_cliques(g, masks)


def _check_cut(g: Graph | UniformHypergraph, cut: VertexCut) -> None:
    if cut.n != g.n:
        raise QuasicutValidationError(f"Cut covers {cut.n} vertices but the graph has {g.n}")


def _count_from(g: Graph, candidates: int, depth: int, higher: Sequence[int], labels: Sequence[int]) -> int:
    if depth == 1:
        return candidates.bit_count()

    total = 0
    for v in iter_bits(candidates):
        total += _count_from(g, candidates & g.rows[v] & higher[labels[v]], depth - 1, higher, labels)

    return total


def cliques_crossing(g: Graph, cut: VertexCut, k: int) -> int:
    """``k``-cliques with at most one vertex in each part of ``cut``; 0 when ``k`` exceeds the part count."""
    if k < 2:
        raise QuasicutValidationError(f"Clique size must be at least 2, got {k}")

    _check_cut(g, cut)
    if k > cut.r:
        return 0

    masks = cut.part_masks
    # higher[i] holds every vertex in a part with index above i
    higher = [0] * cut.r
    running = 0
    for i in range(cut.r - 1, -1, -1):
        higher[i] = running
        running |= masks[i]

    labels = cut.labels
    return sum(_count_from(g, g.rows[v] & higher[labels[v]], k - 1, higher, labels) for v in range(g.n))


def triangles_crossing(g: Graph, cut: VertexCut) -> int:
    return cliques_crossing(g, cut, 3)


def crossing_edges(g: Graph, cut: VertexCut) -> int:
    return cliques_crossing(g, cut, 2)


def count_c4(g: Graph) -> int:
    """4-cycles counted once per subgraph, so ``K4`` has 3."""
    if g.n < 4:
        return 0

    adjacency = g.to_numpy(np.float64)
    codegrees = np.rint(adjacency @ adjacency).astype(np.int64)
    upper = codegrees[np.triu_indices(g.n, k=1)]
    # every cycle is seen once from each of its two diagonals
    return int((upper * (upper - 1) // 2).sum()) // 2


def _cliques_above(g: Graph, candidates: int, depth: int, prefix: tuple[int, ...], out: list[tuple[int, ...]]) -> None:
    if depth == 0:
        out.append(prefix)
        return

    for v in iter_bits(candidates):
        above = candidates & g.rows[v] & ~((1 << (v + 1)) - 1)
        _cliques_above(g, above, depth - 1, (*prefix, v), out)


def iter_cliques(g: Graph, k: int) -> list[tuple[int, ...]]:
    """All ``k``-cliques as sorted vertex tuples in lexicographic order."""
    if k < 1:
        raise QuasicutValidationError(f"Clique size must be positive, got {k}")

    cliques: list[tuple[int, ...]] = []
    _cliques_above(g, g.full_mask, k, (), cliques)
    return cliques


def clique_hypergraph(g: Graph, k: int) -> UniformHypergraph:
    """The ``k``-uniform hypergraph whose hyperedges are the ``k``-cliques of ``g``."""
    if k < 2:
        raise QuasicutValidationError(f"Clique lift needs k >= 2, got {k}")

    return UniformHypergraph(g.n, k, frozenset(iter_cliques(g, k)))


def hyperedges_crossing(h: UniformHypergraph, cut: VertexCut) -> int:
    _check_cut(h, cut)
    if h.k > cut.r or h.m == 0:
        return 0

    labels = np.asarray(cut.labels, dtype=np.int64)
    part_of = np.sort(labels[h.edge_array], axis=1)
    return int(np.all(np.diff(part_of, axis=1) != 0, axis=1).sum())


def hyperedges_within_mask(h: UniformHypergraph, mask: int) -> int:
    if h.m == 0:
        return 0

    members = np.array([(mask >> v) & 1 for v in range(h.n)], dtype=bool)
    return int(np.all(members[h.edge_array], axis=1).sum())


def _equal_part_masks(g: Graph, parts: Sequence[Iterable[int]]) -> tuple[list[int], int]:
    masks = [_as_mask(g, part) for part in parts]
    sizes = {mask.bit_count() for mask in masks}
    if len(sizes) != 1:
        raise QuasicutValidationError(f"Parts must all have the same size, got sizes {sorted(sizes)}")

    union = 0
    for mask in masks:
        if union & mask:
            raise QuasicutValidationError("Parts must be disjoint")
        union |= mask

    return masks, sizes.pop()


def partition_stats(g: Graph, parts: Sequence[Iterable[int]]) -> PartitionStats:
    masks, m = _equal_part_masks(g, parts)
    if m < 2:
        raise QuasicutValidationError(f"Parts need at least 2 vertices for within-part densities, got {m}")

    t = len(masks)
    x = np.zeros(t)
    d = np.zeros((t, t))

    pairs_within = math.comb(m, 2)
    for i in range(t):
        x[i] = edges_within_mask(g, masks[i]) / pairs_within
        for j in range(i + 1, t):
            d[i, j] = d[j, i] = edges_between(g, masks[i], masks[j]) / (m * m)

    return PartitionStats(t=t, m=m, x=x, d=d)


def clique_density_vector(g: Graph, parts: Sequence[Iterable[int]], k: int) -> DensityVectorK:
    """Density of transversal ``k``-cliques for every ``k``-subset of an equipartition."""
    masks, m = _equal_part_masks(g, parts)
    t = len(masks)
    values = np.array(
        [_transversal_cliques(g, [masks[i] for i in subset]) / m**k for subset in colex_subsets(t, k)],
    )
    return DensityVectorK(t, k, values)
