from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from quasicut.checks.report import CheckMode, DeviationReport, PropertyTag, Witness, WitnessKind
from quasicut.core.errors import QuasicutValidationError
from quasicut.core.logging import get_logger
from quasicut.core.parallel import ordered_map
from quasicut.core.utils import derive_seed, make_rng
from quasicut.graphs.counting import edges_between
from quasicut.graphs.graph import Graph

_logcore = get_logger(__name__)


def _density(count: int, a: int, b: int) -> float:
    return count / (a * b)


def regularity_deviation(
    g: Graph,
    xs: Iterable[int],
    ys: Iterable[int],
    epsilon: float,
    trials: int,
    seed: int,
) -> DeviationReport:
    """Sampled lower bound on ``max |d(X, Y) - d(A, B)|`` over large sub-pairs ``A`` of ``X`` and ``B`` of ``Y``.

    Sub-pairs must have ``|A| >= eps|X|`` and ``|B| >= eps|Y|``.

    Besides ``trials`` random sub-pairs, the smallest allowed prefixes of ``X`` and ``Y`` ordered by degree into
    the other side are tried against the full opposite set.
    """
    xs = sorted(set(xs))
    ys = sorted(set(ys))
    if not 0 < epsilon <= 1:
        raise QuasicutValidationError(f"epsilon must lie in (0, 1], got {epsilon}")

    if min(len(xs), len(ys)) < 1 / epsilon:
        raise QuasicutValidationError(f"Both sides need at least 1/epsilon = {1 / epsilon:g} vertices")

    if set(xs) & set(ys):
        raise QuasicutValidationError("The two sides of a pair must be disjoint")

    block = g.to_numpy(np.int64)[np.ix_(xs, ys)]
    overall = _density(int(block.sum()), len(xs), len(ys))
    low_x = math.ceil(epsilon * len(xs))
    low_y = math.ceil(epsilon * len(ys))

    best_value = -1.0
    best_pair: tuple[tuple[int, ...], tuple[int, ...]] = ((), ())

    def offer(rows: np.ndarray, cols: np.ndarray) -> None:
        nonlocal best_value, best_pair
        value = abs(overall - _density(int(block[np.ix_(rows, cols)].sum()), rows.size, cols.size))
        if value > best_value:
            best_value = value
            best_pair = (tuple(xs[i] for i in sorted(rows)), tuple(ys[j] for j in sorted(cols)))

    rng = make_rng(seed)
    for _ in range(trials):
        a = int(rng.integers(low_x, len(xs), endpoint=True))
        b = int(rng.integers(low_y, len(ys), endpoint=True))
        offer(rng.permutation(len(xs))[:a], rng.permutation(len(ys))[:b])

    all_rows = np.arange(len(xs))
    all_cols = np.arange(len(ys))
    row_degrees = block.sum(axis=1)
    col_degrees = block.sum(axis=0)
    for order in (np.argsort(-row_degrees, kind="stable"), np.argsort(row_degrees, kind="stable")):
        offer(order[:low_x], all_cols)
    for order in (np.argsort(-col_degrees, kind="stable"), np.argsort(col_degrees, kind="stable")):
        offer(all_rows, order[:low_y])

    _logcore.trace("Regularity estimate {value:.5f} over {trials} trials", value=best_value, trials=trials)
    return DeviationReport(
        property=PropertyTag.REGULARITY,
        p=overall,
        n=g.n,
        normalization_exponent=0,
        mode=CheckMode.SAMPLED,
        samples=trials + 4,
        max_abs_deviation=best_value,
        witness=Witness(kind=WitnessKind.PAIR, vertices=best_pair[0], other=best_pair[1]),
        seed=seed,
        parameters={"x": list(xs), "y": list(ys), "epsilon": epsilon, "trials": trials},
        flags=("lower_bound",),
    )


def pair_deviation(g: Graph, report: DeviationReport) -> float:
    xs: list[int] = list(report.parameters["x"])  # type: ignore[call-overload]
    ys: list[int] = list(report.parameters["y"])  # type: ignore[call-overload]
    a, b = report.witness.vertices, report.witness.other
    overall = _density(edges_between(g, xs, ys), len(xs), len(ys))
    return abs(overall - _density(edges_between(g, a, b), len(a), len(b)))


@dataclass(frozen=True, kw_only=True)
class ReducedGraph:
    t: int
    epsilon: float
    edges: tuple[tuple[int, int], ...]
    estimates: dict[tuple[int, int], float]

    @property
    def degrees(self) -> list[int]:
        degrees = [0] * self.t
        for i, j in self.edges:
            degrees[i] += 1
            degrees[j] += 1
        return degrees

    @property
    def min_degree(self) -> int:
        return min(self.degrees, default=0)

    @property
    def meets_degree_condition(self) -> bool:
        return self.min_degree >= (1 - self.epsilon) * self.t

    @property
    def irregular_pairs(self) -> int:
        return math.comb(self.t, 2) - len(self.edges)

    def as_graph(self) -> Graph:
        return Graph.from_edges(self.t, self.edges)

    def to_dict(self) -> dict[str, object]:
        return {
            "t": self.t,
            "epsilon": self.epsilon,
            "edges": [list(edge) for edge in self.edges],
            "min_degree": self.min_degree,
            "meets_degree_condition": self.meets_degree_condition,
            "irregular_pairs": self.irregular_pairs,
            "estimates": {f"{i},{j}": value for (i, j), value in sorted(self.estimates.items())},
        }


def reduced_graph(g: Graph, parts: Sequence[Iterable[int]], epsilon: float, trials: int, seed: int) -> ReducedGraph:
    """Graph on part indices joining ``i`` and ``j`` when the estimate for ``(V_i, V_j)`` is at most ``epsilon``."""
    parts = [sorted(part) for part in parts]
    pairs = list(combinations(range(len(parts)), 2))

    def estimate(pair: tuple[int, int]) -> float:
        i, j = pair
        pair_seed = derive_seed(seed, "pair", str(i), str(j))
        return regularity_deviation(g, parts[i], parts[j], epsilon, trials, pair_seed).max_abs_deviation

    estimates = dict(zip(pairs, ordered_map(estimate, pairs), strict=True))
    edges = tuple(pair for pair in pairs if estimates[pair] <= epsilon)
    _logcore.debug(
        "Reduced graph on {t} parts keeps {kept} of {total} pairs",
        t=len(parts),
        kept=len(edges),
        total=len(pairs),
    )
    return ReducedGraph(t=len(parts), epsilon=epsilon, edges=edges, estimates=estimates)
