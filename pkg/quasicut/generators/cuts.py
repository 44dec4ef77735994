from __future__ import annotations

from collections.abc import Iterator, Sequence
from fractions import Fraction

import numpy as np
from sympy.utilities.iterables import multiset_permutations

from quasicut.core.configuration import get_toolkit_config
from quasicut.core.errors import QuasicutBudgetError
from quasicut.core.utils import make_rng
from quasicut.graphs.graph import VertexCut, part_sizes
from quasicut.linalg.families import multinomial


def _base_labels(n: int, alpha: Sequence[Fraction]) -> list[int]:
    return [label for label, size in enumerate(part_sizes(n, alpha)) for _ in range(size)]


def count_cuts(n: int, alpha: Sequence[Fraction]) -> int:
    """Number of ordered cuts of ``n`` vertices with the rounded part sizes of ``alpha``."""
    return multinomial(n, part_sizes(n, alpha))


def sample_balanced_cut(n: int, alpha: Sequence[Fraction], rng: np.random.Generator | int) -> VertexCut:
    """A uniformly random ordered cut with the part sizes of ``alpha``."""
    if isinstance(rng, int):
        rng = make_rng(rng)

    labels = rng.permutation(np.asarray(_base_labels(n, alpha), dtype=np.int64))
    return VertexCut(tuple(int(label) for label in labels), tuple(alpha))


def enumerate_balanced_cuts(n: int, alpha: Sequence[Fraction], *, budget: int | None = None) -> Iterator[VertexCut]:
    """Every ordered cut with the part sizes of ``alpha``, lexicographic in the vertex-to-part label sequence."""
    budget = get_toolkit_config().enumeration_budget if budget is None else budget
    count = count_cuts(n, alpha)
    if count > budget:
        raise QuasicutBudgetError(f"Ordered cuts of {n} vertices", count=count, budget=budget)

    alpha = tuple(alpha)
    for labels in multiset_permutations(_base_labels(n, alpha)):
        yield VertexCut(tuple(labels), alpha)
