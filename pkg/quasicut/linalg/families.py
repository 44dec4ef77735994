from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from functools import cache
from itertools import combinations

import numpy as np
from sympy.utilities.iterables import multiset_permutations

from quasicut.core.configuration import get_toolkit_config
from quasicut.core.errors import QuasicutBudgetError, QuasicutValidationError
from quasicut.core.logging import get_logger
from quasicut.linalg.exact import ExactMatrix

_logcore = get_logger(__name__)


@cache
def colex_subsets(t: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All ``k``-subsets of ``0..t-1`` in colexicographic order."""
    return tuple(sorted(combinations(range(t), k), key=lambda subset: subset[::-1]))


def colex_index(subset: Sequence[int]) -> int:
    """Position of a sorted subset in colexicographic order (combinatorial number system)."""
    return sum(math.comb(element, position + 1) for position, element in enumerate(subset))


def multinomial(t: int, sizes: Sequence[int]) -> int:
    if sum(sizes) != t:
        raise QuasicutValidationError(f"Part sizes {tuple(sizes)} do not add up to {t}")

    count = math.factorial(t)
    for size in sizes:
        count //= math.factorial(size)

    return count


def _equal_part_size(t: int, r: int) -> int:
    if r < 1 or t % r != 0:
        raise QuasicutValidationError(f"{r} parts do not divide {t} elements evenly")

    return t // r


def ordered_equal_cuts(t: int, r: int, *, budget: int | None = None) -> Iterator[tuple[int, ...]]:
    """Label sequences of every ordered cut of ``0..t-1`` into ``r`` equal parts, lexicographically."""
    size = _equal_part_size(t, r)
    count = multinomial(t, [size] * r)
    budget = get_toolkit_config().enumeration_budget if budget is None else budget
    if count > budget:
        raise QuasicutBudgetError(f"Ordered cuts of {t} elements into {r} parts", count=count, budget=budget)

    base = [label for label in range(r) for _ in range(size)]
    for labels in multiset_permutations(base):
        yield tuple(labels)


def unordered_equal_partitions(elements: Sequence[int], blocks: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Partitions of ``elements`` into ``blocks`` unlabeled blocks of equal size.

    Each partition is produced once; block ``i`` is the one holding the smallest element not in earlier blocks.
    """
    if blocks == 0:
        if not elements:
            yield ()
        return

    size = _equal_part_size(len(elements), blocks)
    first, rest = elements[0], elements[1:]
    for companions in combinations(rest, size - 1):
        block = (first, *companions)
        remaining = [e for e in rest if e not in companions]
        for tail in unordered_equal_partitions(remaining, blocks - 1):
            yield (block, *tail)


def inclusion_matrix(t: int, h: int, k: int) -> ExactMatrix:
    """``h``-subsets versus ``k``-subsets of ``0..t-1``; entry ``(I, J)`` is 1 iff ``J`` is contained in ``I``."""
    flags: list[str] = []
    if not t > h >= k >= 1:
        raise QuasicutValidationError(f"Inclusion matrix needs t > h >= k >= 1, got t={t}, h={h}, k={k}")

    if k < 2:
        flags.append("k_below_two")

    rows = colex_subsets(t, h)
    cols = colex_subsets(t, k)
    entries = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for i, row in enumerate(rows):
        for subset in combinations(row, k):
            entries[i, colex_index(subset)] = 1

    return ExactMatrix(f"B({t},{h},{k})", entries, rows, cols, tuple(flags))


def _crossing_entries(labels: np.ndarray, cols: Sequence[Sequence[int]]) -> np.ndarray:
    """Entry ``(X, J)`` is 1 iff the elements of ``J`` carry pairwise distinct labels in row ``X``."""
    entries = np.zeros((labels.shape[0], len(cols)), dtype=np.int64)
    for j, col in enumerate(cols):
        if len(col) <= 1:
            entries[:, j] = 1
            continue

        chosen = np.sort(labels[:, list(col)], axis=1)
        entries[:, j] = np.all(np.diff(chosen, axis=1) != 0, axis=1)

    return entries


def crossing_matrix_M(t: int, r: int, k: int, *, budget: int | None = None) -> ExactMatrix:  # noqa: N802
    """Balanced ordered cuts of ``0..t-1`` into ``r`` parts versus ``k``-subsets; 1 where the subset crosses."""
    if k < 1:
        raise QuasicutValidationError("Subset size must be at least 1")

    rows = tuple(ordered_equal_cuts(t, r, budget=budget))
    cols = colex_subsets(t, k)
    labels = np.array(rows, dtype=np.int64).reshape(len(rows), t)
    _logcore.debug("Built {rows} ordered cuts for M({t},{r},{k})", rows=len(rows), t=t, r=r, k=k)
    return ExactMatrix(f"M({t},{r},{k})", _crossing_entries(labels, cols), rows, cols)


def crossing_submatrix_N(t: int, r: int, k: int, *, budget: int | None = None) -> ExactMatrix:  # noqa: N802
    """Rows of ``M`` whose cut separates 0 and 1; columns of ``M`` whose subset contains both."""
    if k < 2:
        raise QuasicutValidationError("N needs subsets of size at least 2")

    full = crossing_matrix_M(t, r, k, budget=budget)
    row_index = [i for i, labels in enumerate(full.row_labels) if labels[0] != labels[1]]
    col_index = [j for j, subset in enumerate(full.col_labels) if subset[0] == 0 and subset[1] == 1]
    entries = full.entries[np.ix_(row_index, col_index)]

    return ExactMatrix(
        f"N({t},{r},{k})",
        entries,
        tuple(full.row_labels[i] for i in row_index),
        tuple(full.col_labels[j] for j in col_index),
    )


def dedup_rows(matrix: ExactMatrix) -> ExactMatrix:
    """Drop repeated rows, keeping the first occurrence of each in its original order."""
    if matrix.shape[0] == 0:
        return matrix

    if matrix.entries.dtype == object:
        seen: dict[tuple[object, ...], int] = {}
        for i, row in enumerate(matrix.entries.tolist()):
            seen.setdefault(tuple(row), i)
        keep = sorted(seen.values())
    else:
        _, first = np.unique(matrix.entries, axis=0, return_index=True)
        keep = sorted(int(i) for i in first)

    return ExactMatrix(
        f"dedup({matrix.name})",
        matrix.entries[keep],
        tuple(matrix.row_labels[i] for i in keep),
        matrix.col_labels,
        matrix.flags,
    )


def reduced_crossing_matrix(t: int, r: int, k: int) -> ExactMatrix:
    """The row-deduplicated ``N`` built without enumerating ordered cuts.

    Crossing only depends on the unordered partition, so rows are generated from canonical label sequences
    (0 in part 0, 1 in part 1, remaining parts numbered by first appearance).
    """
    if k < 2:
        raise QuasicutValidationError("N needs subsets of size at least 2")

    _equal_part_size(t, r)
    cols = tuple((0, 1, *(e + 2 for e in subset)) for subset in colex_subsets(t - 2, k - 2))

    label_rows: list[tuple[int, ...]] = []
    for partition in unordered_equal_partitions(list(range(t)), r):
        labels = [0] * t
        for block_index, block in enumerate(partition):
            for element in block:
                labels[element] = block_index

        if labels[0] == labels[1]:
            continue

        # blocks come ordered by their smallest element, so 0 is already in block 0 and 1 in block 1
        label_rows.append(tuple(labels))

    labels_array = np.array(label_rows, dtype=np.int64).reshape(len(label_rows), t)
    reduced = ExactMatrix(
        f"Nred({t},{r},{k})",
        _crossing_entries(labels_array, cols),
        tuple(label_rows),
        cols,
    )
    return dedup_rows(reduced)
