from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from quasicut.core.errors import QuasicutValidationError


def mask_of(vertices: Iterable[int], n: int) -> int:
    mask = 0
    for v in vertices:
        if not 0 <= v < n:
            raise QuasicutValidationError(f"Vertex {v} is out of range for a graph on {n} vertices")
        mask |= 1 << v

    return mask


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True, eq=True)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    Row ``v`` of ``rows`` is the neighbourhood of ``v`` as a bit-set.
    """

    n: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.n:
            raise QuasicutValidationError(f"Expected {self.n} adjacency rows, got {len(self.rows)}")

        full = (1 << self.n) - 1
        for v, row in enumerate(self.rows):
            if row & ~full:
                raise QuasicutValidationError(f"Row {v} references vertices outside 0..{self.n - 1}")

            if (row >> v) & 1:
                raise QuasicutValidationError(f"Vertex {v} has a loop")

            for u in iter_bits(row):
                if not (self.rows[u] >> v) & 1:
                    raise QuasicutValidationError(f"Adjacency is not symmetric: {v} sees {u} but {u} does not see {v}")

    @staticmethod
    def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        if n < 0:
            raise QuasicutValidationError("Vertex count must be non-negative")

        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise QuasicutValidationError(f"Edge ({u}, {v}) is out of range for a graph on {n} vertices")

            if u == v:
                raise QuasicutValidationError(f"Edge ({u}, {v}) is a loop")

            rows[u] |= 1 << v
            rows[v] |= 1 << u

        return Graph(n, tuple(rows))

    @staticmethod
    def from_adjacency_matrix(matrix: np.ndarray) -> Graph:
        matrix = np.asarray(matrix, dtype=bool)
        n = matrix.shape[0]
        if matrix.shape != (n, n):
            raise QuasicutValidationError("Adjacency matrix must be square")

        if not np.array_equal(matrix, matrix.T):
            raise QuasicutValidationError("Adjacency matrix must be symmetric")

        rows = tuple(int.from_bytes(np.packbits(matrix[v], bitorder="little").tobytes(), "little") for v in range(n))
        return Graph(n, rows)

    @staticmethod
    def empty(n: int) -> Graph:
        return Graph(n, (0,) * n)

    @staticmethod
    def complete(n: int) -> Graph:
        full = (1 << n) - 1
        return Graph(n, tuple(full & ~(1 << v) for v in range(n)))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def m(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> list[int]:
        return [row.bit_count() for row in self.rows]

    def min_degree(self) -> int:
        return min(self.degrees(), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        for u, row in enumerate(self.rows):
            yield from ((u, v) for v in iter_bits(row >> (u + 1) << (u + 1)))

    def to_numpy(self, dtype: type = np.int64) -> np.ndarray:
        if self.n == 0:
            return np.zeros((0, 0), dtype=dtype)

        width = (self.n + 7) // 8
        packed = np.frombuffer(b"".join(row.to_bytes(width, "little") for row in self.rows), dtype=np.uint8)
        bits = np.unpackbits(packed.reshape(self.n, width), axis=1, bitorder="little")[:, : self.n]
        return bits.astype(dtype)

    def complement(self) -> Graph:
        full = self.full_mask
        return Graph(self.n, tuple(full & ~row & ~(1 << v) for v, row in enumerate(self.rows)))

    def relabel(self, order: Sequence[int]) -> Graph:
        """Graph whose vertex ``i`` is vertex ``order[i]`` of this graph."""
        if sorted(order) != list(range(self.n)):
            raise QuasicutValidationError("Relabelling must be a permutation of the vertices")

        position = {old: new for new, old in enumerate(order)}
        return Graph.from_edges(self.n, ((position[u], position[v]) for u, v in self.edges()))


@dataclass(frozen=True, eq=True)
class UniformHypergraph:
    n: int
    k: int
    edges: frozenset[tuple[int, ...]]

    def __post_init__(self) -> None:
        if self.k < 1:
            raise QuasicutValidationError("Uniformity must be at least 1")

        for edge in self.edges:
            if len(edge) != self.k or len(set(edge)) != self.k:
                raise QuasicutValidationError(f"Hyperedge {edge} does not have {self.k} distinct vertices")

            if tuple(sorted(edge)) != edge:
                raise QuasicutValidationError(f"Hyperedge {edge} is not stored in sorted order")

            if edge[0] < 0 or edge[-1] >= self.n:
                raise QuasicutValidationError(f"Hyperedge {edge} is out of range for {self.n} vertices")

    @staticmethod
    def from_edges(n: int, k: int, edges: Iterable[Iterable[int]]) -> UniformHypergraph:
        canonical = [tuple(sorted(edge)) for edge in edges]
        unique = frozenset(canonical)
        if len(unique) != len(canonical):
            raise QuasicutValidationError("Hypergraph contains duplicate hyperedges")

        return UniformHypergraph(n, k, unique)

    @property
    def m(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[tuple[int, ...]]:
        return sorted(self.edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        if not self.edges:
            return np.zeros((0, self.k), dtype=np.int64)

        return np.array(self.sorted_edges(), dtype=np.int64)


def part_sizes(n: int, alpha: Sequence[Fraction]) -> tuple[int, ...]:
    """Round ``alpha * n`` to integer sizes summing to ``n``.

    Every part gets its floor; leftover vertices go to the largest remainders, ties to the lower index.
    """
    if sum(alpha) != 1:
        raise QuasicutValidationError(f"Size vector must sum to 1, got {sum(alpha)}")

    exact = [a * n for a in alpha]
    sizes = [math.floor(e) for e in exact]
    leftover = n - sum(sizes)
    by_remainder = sorted(range(len(alpha)), key=lambda i: (-(exact[i] - sizes[i]), i))
    for i in by_remainder[:leftover]:
        sizes[i] += 1

    return tuple(sizes)


@dataclass(frozen=True, eq=True)
class VertexCut:
    """Ordered partition of ``0..n-1``; ``labels[v]`` is the part holding vertex ``v``."""

    labels: tuple[int, ...]
    alpha: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        r = len(self.alpha)
        if any(not 0 <= label < r for label in self.labels):
            raise QuasicutValidationError(f"Part labels must lie in 0..{r - 1}")

        n = len(self.labels)
        counts = [0] * r
        for label in self.labels:
            counts[label] += 1

        for i, (count, a) in enumerate(zip(counts, self.alpha, strict=True)):
            target = a * n
            if count not in {math.floor(target), math.ceil(target)}:
                raise QuasicutValidationError(f"Part {i} has {count} vertices, expected about {float(target):.3f}")

    @staticmethod
    def from_parts(parts: Sequence[Iterable[int]], alpha: Sequence[Fraction] | None = None) -> VertexCut:
        part_lists = [sorted(part) for part in parts]
        n = sum(len(part) for part in part_lists)
        labels = [-1] * n
        for i, part in enumerate(part_lists):
            for v in part:
                if not 0 <= v < n:
                    raise QuasicutValidationError(f"Vertex {v} is out of range for a cut of {n} vertices")

                if labels[v] != -1:
                    raise QuasicutValidationError(f"Vertex {v} appears in more than one part")

                labels[v] = i

        if alpha is None:
            alpha = tuple(Fraction(len(part), n) for part in part_lists)

        return VertexCut(tuple(labels), tuple(alpha))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def r(self) -> int:
        return len(self.alpha)

    @cached_property
    def part_masks(self) -> tuple[int, ...]:
        masks = [0] * self.r
        for v, label in enumerate(self.labels):
            masks[label] |= 1 << v

        return tuple(masks)

    @cached_property
    def parts(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(iter_bits(mask)) for mask in self.part_masks)

    def sizes(self) -> tuple[int, ...]:
        return tuple(mask.bit_count() for mask in self.part_masks)


@dataclass(frozen=True)
class PartitionStats:
    """Within-part densities ``x`` and pairwise densities ``d`` of an equipartition into ``t`` parts of size ``m``."""

    t: int
    m: int
    x: np.ndarray
    d: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.x.shape != (self.t,) or self.d.shape != (self.t, self.t):
            raise QuasicutValidationError("Density arrays do not match the part count")

        if not np.allclose(self.d, self.d.T, rtol=0, atol=1e-12):
            raise QuasicutValidationError("Pair density matrix must be symmetric")

    @staticmethod
    def from_targets(x: Sequence[float], d: Sequence[Sequence[float]] | np.ndarray, m: int = 0) -> PartitionStats:
        x_arr = np.asarray(x, dtype=float)
        d_arr = np.array(d, dtype=float)
        np.fill_diagonal(d_arr, 0.0)
        return PartitionStats(t=len(x_arr), m=m, x=x_arr, d=d_arr)

    def pair_densities(self) -> np.ndarray:
        return self.d[np.triu_indices(self.t, k=1)]

    def min_pair_density(self) -> float:
        values = self.pair_densities()
        return float(values.min()) if values.size else 0.0

    def to_dict(self) -> dict[str, object]:
        return {
            "t": self.t,
            "m": self.m,
            "x": [float(v) for v in self.x],
            "d": [[float(v) for v in row] for row in self.d],
            "min_pair_density": self.min_pair_density(),
        }
