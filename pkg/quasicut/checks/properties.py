from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from fractions import Fraction
from itertools import combinations

import numpy as np
from sympy.utilities.iterables import multiset_permutations

from quasicut.checks.regularity import pair_deviation
from quasicut.checks.report import (
    CheckMode,
    ConcentrationReport,
    DeviationReport,
    PropertyTag,
    Witness,
    WitnessKind,
)
from quasicut.core.configuration import get_toolkit_config
from quasicut.core.errors import QuasicutValidationError
from quasicut.core.logging import get_logger
from quasicut.core.parallel import ordered_map
from quasicut.core.utils import format_alpha, make_block_rng, make_rng, parse_alpha
from quasicut.generators.cuts import count_cuts
from quasicut.graphs.counting import (
    cliques_crossing,
    count_c4,
    edges_within_mask,
    hyperedges_crossing,
    hyperedges_within_mask,
)
from quasicut.graphs.graph import Graph, UniformHypergraph, VertexCut, iter_bits, mask_of, part_sizes

_logcore = get_logger(__name__)

_CHUNK = 1024


def normalized_deviation(count: float, target: float, n: int, exponent: int) -> float:
    return abs(float(count) - target) / float(n) ** exponent


def _batch_deviation(counts: np.ndarray, target: float, n: int, exponent: int) -> np.ndarray:
    return np.abs(counts.astype(np.float64) - target) / float(n) ** exponent


def elementary_symmetric(alpha: Sequence[Fraction], k: int) -> Fraction:
    """Sum over ``k``-subsets of parts of the product of their sizes."""
    return sum((math.prod(chosen) for chosen in combinations(alpha, k)), Fraction(0))


def cut_target(weight: float, n: int, k: int, alpha: Sequence[Fraction]) -> float:
    return weight * float(n) ** k * float(elementary_symmetric(alpha, k))


def _p1_target(p: float, size: int) -> float:
    return p * size * size / 2


def _chunk_sizes(budget: int) -> list[int]:
    return [min(_CHUNK, budget - start) for start in range(0, budget, _CHUNK)]


class _Best:
    """Running maximum that keeps the first candidate on ties."""

    def __init__(self) -> None:
        self.value = -1.0
        self.witness: Witness | None = None

    def offer(self, value: float, witness: Callable[[], Witness]) -> None:
        if value > self.value:
            self.value = value
            self.witness = witness()

    def offer_batch(self, values: np.ndarray, witness: Callable[[int], Witness]) -> None:
        if values.size == 0:
            return

        index = int(np.argmax(values))
        self.offer(float(values[index]), lambda: witness(index))


def _subset_witness(mask: int) -> Witness:
    return Witness(kind=WitnessKind.SUBSET, vertices=tuple(iter_bits(mask)))


def _row_witness(row: np.ndarray) -> Witness:
    return Witness(kind=WitnessKind.SUBSET, vertices=tuple(int(v) for v in np.flatnonzero(row)))


def _degree_order(degrees: Sequence[int], *, descending: bool) -> list[int]:
    sign = -1 if descending else 1
    return sorted(range(len(degrees)), key=lambda v: (sign * degrees[v], v))


def _edges_in_rows(adjacency: np.ndarray, members: np.ndarray) -> np.ndarray:
    x = members.astype(np.float64)
    return np.rint(((x @ adjacency) * x).sum(axis=1) / 2).astype(np.int64)


# --------------------------------------------------------------------------- P1 / P2


def _exhaustive_p1(g: Graph, p: float, best: _Best) -> int:
    n = g.n
    mask = 0
    edges = 0
    size = 0
    best.offer(normalized_deviation(0, _p1_target(p, 0), n, 2), lambda: _subset_witness(0))
    for step in range(1, 1 << n):
        v = (step & -step).bit_length() - 1
        if (mask >> v) & 1:
            mask ^= 1 << v
            edges -= (g.rows[v] & mask).bit_count()
            size -= 1
        else:
            edges += (g.rows[v] & mask).bit_count()
            mask |= 1 << v
            size += 1

        value = normalized_deviation(edges, _p1_target(p, size), n, 2)
        if value > best.value:
            current = mask
            best.offer(value, lambda current=current: _subset_witness(current))

    return 1 << n


def _prefix_candidates(g: Graph, p: float) -> tuple[int, int, int]:
    """Degree-ordered prefixes; returns the best structured candidate as ``(mask, edges, size)``."""
    degrees = g.degrees()
    best_local = (-1.0, 0, 0, 0)
    for descending in (True, False):
        mask = 0
        edges = 0
        for size, v in enumerate(_degree_order(degrees, descending=descending), start=1):
            edges += (g.rows[v] & mask).bit_count()
            mask |= 1 << v
            value = normalized_deviation(edges, _p1_target(p, size), g.n, 2)
            if value > best_local[0]:
                best_local = (value, mask, edges, size)

    _, mask, edges, size = best_local
    return mask, edges, size


def _improve_subset(g: Graph, p: float, mask: int, edges: int, size: int) -> tuple[int, int, int]:
    """One pass toggling single vertices whenever the deviation grows."""
    current = normalized_deviation(edges, _p1_target(p, size), g.n, 2)
    for v in range(g.n):
        inside = (g.rows[v] & mask & ~(1 << v)).bit_count()
        if (mask >> v) & 1:
            candidate = (mask & ~(1 << v), edges - inside, size - 1)
        else:
            candidate = (mask | (1 << v), edges + inside, size + 1)

        value = normalized_deviation(candidate[1], _p1_target(p, candidate[2]), g.n, 2)
        if value > current:
            mask, edges, size = candidate
            current = value

    return mask, edges, size


def _sampled_subsets(
    g: Graph,
    seed: int,
    budget: int,
    evaluate: Callable[[np.ndarray], np.ndarray],
    draw: Callable[[np.random.Generator, int, int], np.ndarray],
    best: _Best,
) -> None:
    def run(chunk: int) -> tuple[np.ndarray, np.ndarray]:
        members = draw(make_block_rng(seed, chunk), sizes[chunk], chunk * _CHUNK)
        _logcore.trace("Evaluating subset chunk {chunk} of size {size}", chunk=chunk, size=sizes[chunk])
        return members, evaluate(members)

    sizes = _chunk_sizes(budget)
    for members, values in ordered_map(run, list(range(len(sizes)))):
        best.offer_batch(values, lambda index, members=members: _row_witness(members[index]))


def check_p1(g: Graph, p: float, budget: int, seed: int) -> DeviationReport:
    """Largest ``|e(U) - p|U|^2/2| / n^2`` over all subsets, or over sampled and structured candidates."""
    best = _Best()
    flags: list[str] = []

    if g.n == 0:
        best.offer(0.0, lambda: _subset_witness(0))
        samples, mode = 1, CheckMode.EXHAUSTIVE
    elif 1 << g.n <= get_toolkit_config().exhaustive_subset_limit:
        samples, mode = _exhaustive_p1(g, p, best), CheckMode.EXHAUSTIVE
    else:
        adjacency = g.to_numpy(np.float64)

        def evaluate(members: np.ndarray) -> np.ndarray:
            edges = _edges_in_rows(adjacency, members)
            sizes = members.sum(axis=1)
            return np.abs(edges.astype(np.float64) - p * sizes * sizes / 2) / float(g.n) ** 2

        def draw(rng: np.random.Generator, size: int, _offset: int) -> np.ndarray:
            return rng.random((size, g.n)) < 0.5

        _sampled_subsets(g, seed, budget, evaluate, draw, best)

        mask, edges, size = _prefix_candidates(g, p)
        best.offer(normalized_deviation(edges, _p1_target(p, size), g.n, 2), lambda: _subset_witness(mask))
        mask, edges, size = _improve_subset(g, p, mask, edges, size)
        best.offer(normalized_deviation(edges, _p1_target(p, size), g.n, 2), lambda: _subset_witness(mask))

        samples, mode = budget + 2 * g.n + 1, CheckMode.SAMPLED
        flags.append("lower_bound")

    _logcore.debug("P1 check in {mode} mode over {samples} candidates", mode=mode, samples=samples)
    return DeviationReport(
        property=PropertyTag.P1,
        p=p,
        n=g.n,
        normalization_exponent=2,
        mode=mode,
        samples=samples,
        max_abs_deviation=best.value,
        witness=best.witness,  # type: ignore[arg-type]
        seed=seed,
        parameters={"budget": budget},
        flags=tuple(flags),
    )


def p2_sizes(n: int, alpha: float) -> tuple[int, ...]:
    if not 0 < alpha < 1:
        raise QuasicutValidationError(f"Subset fraction must lie strictly between 0 and 1, got {alpha}")

    if alpha * n < 2:
        raise QuasicutValidationError(f"alpha * n = {alpha * n} is below 2")

    return tuple(sorted({math.floor(alpha * n), math.ceil(alpha * n)}))


def _swap_pass(adjacency: np.ndarray, p: float, members: np.ndarray) -> np.ndarray:
    """One pass swapping each member for the outside vertex that pushes ``e(U)`` furthest from its target."""
    members = members.copy()
    size = int(members.sum())
    target = _p1_target(p, size)
    inside_degree = adjacency @ members.astype(np.float64)
    edges = float(inside_degree[members].sum() / 2)

    for u in np.flatnonzero(members):
        if not members[u]:
            continue

        outside = np.flatnonzero(~members)
        if outside.size == 0:
            break

        swapped = edges - inside_degree[u] + inside_degree[outside] - adjacency[u, outside]
        choice = int(np.argmax(np.abs(swapped - target)))
        if abs(swapped[choice] - target) > abs(edges - target):
            w = int(outside[choice])
            members[u] = False
            members[w] = True
            edges = float(swapped[choice])
            inside_degree += adjacency[:, w] - adjacency[:, u]

    return members


def check_p2(g: Graph, p: float, alpha: float, budget: int, seed: int) -> DeviationReport:
    """As :func:`check_p1` restricted to subsets of size ``floor(alpha n)`` or ``ceil(alpha n)``."""
    sizes = p2_sizes(g.n, alpha)
    best = _Best()
    flags: list[str] = []
    total = sum(math.comb(g.n, size) for size in sizes)

    if total <= get_toolkit_config().exhaustive_subset_limit:
        for size in sizes:
            for chosen in combinations(range(g.n), size):
                mask = mask_of(chosen, g.n)
                value = normalized_deviation(edges_within_mask(g, mask), _p1_target(p, size), g.n, 2)
                if value > best.value:
                    best.offer(value, lambda mask=mask: _subset_witness(mask))
        samples, mode = total, CheckMode.EXHAUSTIVE
    else:
        adjacency = g.to_numpy(np.float64)

        def evaluate(members: np.ndarray) -> np.ndarray:
            edges = _edges_in_rows(adjacency, members)
            counts = members.sum(axis=1)
            return np.abs(edges.astype(np.float64) - p * counts * counts / 2) / float(g.n) ** 2

        def draw(rng: np.random.Generator, size: int, offset: int) -> np.ndarray:
            ranks = rng.random((size, g.n)).argsort(axis=1).argsort(axis=1)
            wanted = np.array([sizes[(offset + i) % len(sizes)] for i in range(size)])
            return ranks < wanted[:, None]

        _sampled_subsets(g, seed, budget, evaluate, draw, best)

        degrees = g.degrees()
        structured: list[np.ndarray] = []
        for size in sizes:
            for descending in (True, False):
                members = np.zeros(g.n, dtype=bool)
                members[_degree_order(degrees, descending=descending)[:size]] = True
                structured.append(members)

        values = evaluate(np.array(structured))
        start = int(np.argmax(values))
        best.offer_batch(values, lambda index: _row_witness(structured[index]))

        improved = _swap_pass(adjacency, p, structured[start])
        best.offer_batch(evaluate(improved[None, :]), lambda _index: _row_witness(improved))

        samples, mode = budget + len(structured) + 1, CheckMode.SAMPLED
        flags.append("lower_bound")

    _logcore.debug("P2 check in {mode} mode over {samples} candidates", mode=mode, samples=samples)
    return DeviationReport(
        property=PropertyTag.P2,
        p=p,
        n=g.n,
        normalization_exponent=2,
        mode=mode,
        samples=samples,
        max_abs_deviation=best.value,
        witness=best.witness,  # type: ignore[arg-type]
        seed=seed,
        parameters={"alpha": alpha, "budget": budget, "sizes": list(sizes)},
        flags=tuple(flags),
    )


def p3_components(g: Graph, p: float) -> dict[str, float]:
    n = g.n
    return {
        "edges": normalized_deviation(g.m, p * n * n / 2, n, 2) if n else 0.0,
        "c4": normalized_deviation(count_c4(g), p**4 * float(n) ** 4 / 8, n, 4) if n else 0.0,
    }


def check_p3(g: Graph, p: float) -> DeviationReport:
    """Edge count and 4-cycle count against ``p n^2 / 2`` and ``p^4 n^4 / 8``."""
    components = p3_components(g, p)
    return DeviationReport(
        property=PropertyTag.P3,
        p=p,
        n=g.n,
        normalization_exponent=4,
        mode=CheckMode.CLOSED_FORM,
        samples=1,
        max_abs_deviation=max(components.values()),
        witness=Witness(kind=WitnessKind.WHOLE),
        components=components,
    )


# --------------------------------------------------------------------------- cut properties


def _base_labels(n: int, alpha: Sequence[Fraction]) -> np.ndarray:
    return np.repeat(np.arange(len(alpha)), part_sizes(n, alpha))


def _cut_witness(labels: np.ndarray | Sequence[int]) -> Witness:
    return Witness(kind=WitnessKind.CUT, labels=tuple(int(label) for label in labels))


def _degree_cut(degrees: Sequence[int], alpha: Sequence[Fraction]) -> np.ndarray:
    base = _base_labels(len(degrees), alpha)
    labels = np.empty(len(degrees), dtype=np.int64)
    labels[_degree_order(degrees, descending=True)] = base
    return labels


def _scan_cuts(
    *,
    n: int,
    alpha: Sequence[Fraction],
    budget: int,
    seed: int,
    counts_for: Callable[[np.ndarray], np.ndarray],
    target: float,
    exponent: int,
    degrees: Sequence[int],
) -> tuple[_Best, int, CheckMode, list[str]]:
    best = _Best()
    flags: list[str] = []
    total = count_cuts(n, alpha)

    if total <= get_toolkit_config().exhaustive_cut_limit:
        base = _base_labels(n, alpha).tolist()
        chunk: list[list[int]] = []

        def flush() -> None:
            labels = np.array(chunk, dtype=np.int64).reshape(len(chunk), n)
            values = _batch_deviation(counts_for(labels), target, n, exponent)
            best.offer_batch(values, lambda index: _cut_witness(labels[index]))
            chunk.clear()

        for labels in multiset_permutations(base):
            chunk.append(labels)
            if len(chunk) == _CHUNK:
                flush()
        if chunk:
            flush()

        return best, total, CheckMode.EXHAUSTIVE, flags

    flags.extend(("exhaustive_limit_exceeded", "lower_bound"))
    base = _base_labels(n, alpha)
    sizes = _chunk_sizes(budget)

    def run(index: int) -> tuple[np.ndarray, np.ndarray]:
        order = make_block_rng(seed, index).random((sizes[index], n)).argsort(axis=1)
        labels = base[order]
        _logcore.trace("Evaluating cut chunk {chunk} of size {size}", chunk=index, size=sizes[index])
        return labels, _batch_deviation(counts_for(labels), target, n, exponent)

    for labels, values in ordered_map(run, list(range(len(sizes)))):
        best.offer_batch(values, lambda index, labels=labels: _cut_witness(labels[index]))

    structured = _degree_cut(degrees, alpha)[None, :]
    best.offer_batch(
        _batch_deviation(counts_for(structured), target, n, exponent),
        lambda _index: _cut_witness(structured[0]),
    )
    return best, budget + 1, CheckMode.SAMPLED, flags


def _check_alpha(alpha: Sequence[Fraction], minimum_parts: int) -> tuple[Fraction, ...]:
    alpha = tuple(alpha)
    if sum(alpha) != 1:
        raise QuasicutValidationError(f"Size vector must sum to 1, got {format_alpha(alpha)}")

    if len(alpha) < minimum_parts:
        raise QuasicutValidationError(f"Cut needs at least {minimum_parts} parts, got {len(alpha)}")

    return alpha


def _crossing_edge_counts(g: Graph, r: int) -> Callable[[np.ndarray], np.ndarray]:
    adjacency = g.to_numpy(np.float64)

    def counts(labels: np.ndarray) -> np.ndarray:
        within = np.zeros(labels.shape[0], dtype=np.int64)
        for part in range(r):
            within += _edges_in_rows(adjacency, labels == part)
        return g.m - within

    return counts


def check_cut_graph(g: Graph, p: float, alpha: Sequence[Fraction], budget: int, seed: int) -> DeviationReport:
    """Crossing edges of ``alpha``-cuts against ``p n^2`` times the sum of pairwise part products."""
    alpha = _check_alpha(alpha, 2)
    target = cut_target(p, g.n, 2, alpha)
    best, samples, mode, flags = _scan_cuts(
        n=g.n,
        alpha=alpha,
        budget=budget,
        seed=seed,
        counts_for=_crossing_edge_counts(g, len(alpha)),
        target=target,
        exponent=2,
        degrees=g.degrees(),
    )
    _logcore.debug("Cut check in {mode} mode over {samples} cuts", mode=mode, samples=samples)
    return DeviationReport(
        property=PropertyTag.CUT_GRAPH,
        p=p,
        n=g.n,
        normalization_exponent=2,
        mode=mode,
        samples=samples,
        max_abs_deviation=best.value,
        witness=best.witness,  # type: ignore[arg-type]
        seed=seed,
        parameters={"alpha": format_alpha(alpha), "budget": budget},
        components={"target": target},
        flags=tuple(flags),
    )


def check_clique_cut(g: Graph, p: float, k: int, alpha: Sequence[Fraction], budget: int, seed: int) -> DeviationReport:
    """Crossing ``k``-cliques of ``alpha``-cuts against ``p^C(k,2) n^k e_k(alpha)``."""
    if k < 2:
        raise QuasicutValidationError(f"Clique size must be at least 2, got {k}")

    alpha = _check_alpha(alpha, k)
    target = cut_target(p ** math.comb(k, 2), g.n, k, alpha)

    def counts(labels: np.ndarray) -> np.ndarray:
        return np.array(
            [cliques_crossing(g, VertexCut(tuple(int(v) for v in row), alpha), k) for row in labels],
            dtype=np.int64,
        )

    best, samples, mode, flags = _scan_cuts(
        n=g.n,
        alpha=alpha,
        budget=budget,
        seed=seed,
        counts_for=counts,
        target=target,
        exponent=k,
        degrees=g.degrees(),
    )
    _logcore.debug("K{k} cut check in {mode} mode over {samples} cuts", k=k, mode=mode, samples=samples)
    return DeviationReport(
        property=PropertyTag.CLIQUE_CUT,
        p=p,
        n=g.n,
        normalization_exponent=k,
        mode=mode,
        samples=samples,
        max_abs_deviation=best.value,
        witness=best.witness,  # type: ignore[arg-type]
        seed=seed,
        parameters={"alpha": format_alpha(alpha), "budget": budget, "k": k},
        components={"target": target},
        flags=tuple(flags),
    )


def _hyper_degrees(h: UniformHypergraph) -> list[int]:
    return np.bincount(h.edge_array.ravel(), minlength=h.n).tolist() if h.m else [0] * h.n


def check_cut_hypergraph(
    h: UniformHypergraph,
    p: float,
    alpha: Sequence[Fraction],
    budget: int,
    seed: int,
) -> DeviationReport:
    """Crossing hyperedges of ``alpha``-cuts against ``p n^k e_k(alpha)``."""
    alpha = _check_alpha(alpha, 1)
    if len(alpha) < h.k:
        raise QuasicutValidationError(f"A {h.k}-uniform cut check needs at least {h.k} parts, got {len(alpha)}")

    target = cut_target(p, h.n, h.k, alpha)

    def counts(labels: np.ndarray) -> np.ndarray:
        return np.array(
            [hyperedges_crossing(h, VertexCut(tuple(int(v) for v in row), alpha)) for row in labels],
            dtype=np.int64,
        )

    best, samples, mode, flags = _scan_cuts(
        n=h.n,
        alpha=alpha,
        budget=budget,
        seed=seed,
        counts_for=counts,
        target=target,
        exponent=h.k,
        degrees=_hyper_degrees(h),
    )
    return DeviationReport(
        property=PropertyTag.CUT_HYPERGRAPH,
        p=p,
        n=h.n,
        normalization_exponent=h.k,
        mode=mode,
        samples=samples,
        max_abs_deviation=best.value,
        witness=best.witness,  # type: ignore[arg-type]
        seed=seed,
        parameters={"alpha": format_alpha(alpha), "budget": budget, "k": h.k},
        components={"target": target},
        flags=tuple(flags),
    )


def _hyper_p1_target(p: float, size: int, k: int) -> float:
    return p * float(size) ** k / math.factorial(k)


def check_hypergraph_p1(h: UniformHypergraph, p: float, budget: int, seed: int) -> DeviationReport:
    """Largest ``|e(U) - p|U|^k/k!| / n^k`` over subsets ``U``."""
    n, k = h.n, h.k
    best = _Best()
    flags: list[str] = []
    edges = h.edge_array

    def evaluate(members: np.ndarray) -> np.ndarray:
        inside = members[:, edges].all(axis=2).sum(axis=1) if h.m else np.zeros(members.shape[0], dtype=np.int64)
        sizes = members.sum(axis=1).astype(np.float64)
        return np.abs(inside.astype(np.float64) - p * sizes**k / math.factorial(k)) / float(n) ** k

    bits = np.arange(n, dtype=np.int64)
    if 1 << n <= get_toolkit_config().exhaustive_subset_limit:
        total = 1 << n
        for start in range(0, total, _CHUNK):
            masks = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
            members = ((masks[:, None] >> bits) & 1).astype(bool)
            best.offer_batch(evaluate(members), lambda index, members=members: _row_witness(members[index]))
        samples, mode = total, CheckMode.EXHAUSTIVE
    else:

        def draw(rng: np.random.Generator, size: int, _offset: int) -> np.ndarray:
            return rng.random((size, n)) < 0.5

        def run(chunk: int) -> tuple[np.ndarray, np.ndarray]:
            members = draw(make_block_rng(seed, chunk), sizes[chunk], chunk * _CHUNK)
            return members, evaluate(members)

        sizes = _chunk_sizes(budget)
        for members, values in ordered_map(run, list(range(len(sizes)))):
            best.offer_batch(values, lambda index, members=members: _row_witness(members[index]))

        degrees = _hyper_degrees(h)
        prefixes = []
        for descending in (True, False):
            order = _degree_order(degrees, descending=descending)
            for size in range(1, n + 1):
                members = np.zeros(n, dtype=bool)
                members[order[:size]] = True
                prefixes.append(members)
        structured = np.array(prefixes)
        best.offer_batch(evaluate(structured), lambda index: _row_witness(structured[index]))

        samples, mode = budget + len(prefixes), CheckMode.SAMPLED
        flags.append("lower_bound")

    return DeviationReport(
        property=PropertyTag.HYPERGRAPH_P1,
        p=p,
        n=n,
        normalization_exponent=k,
        mode=mode,
        samples=samples,
        max_abs_deviation=best.value,
        witness=best.witness,  # type: ignore[arg-type]
        seed=seed,
        parameters={"budget": budget, "k": k},
        flags=tuple(flags),
    )


# --------------------------------------------------------------------------- concentration and witnesses


def subset_concentration(g: Graph, alpha: float, trials: int, tol: float, seed: int) -> ConcentrationReport:
    """Random subsets keeping each vertex with probability ``alpha``, compared with ``alpha^2 e(G)``."""
    if not 0 < alpha <= 1:
        raise QuasicutValidationError(f"Inclusion probability must lie in (0, 1], got {alpha}")

    pairs = math.comb(g.n, 2)
    density = g.m / pairs if pairs else 0.0
    expected = alpha * alpha * density * pairs

    members = make_rng(seed).random((trials, g.n)) < alpha
    edges = _edges_in_rows(g.to_numpy(np.float64), members) if trials else np.zeros(0, dtype=np.int64)
    deviations = tuple(float(v) for v in _batch_deviation(edges, expected, g.n, 2))

    return ConcentrationReport(
        n=g.n,
        alpha=alpha,
        density=density,
        trials=trials,
        tolerance=tol,
        deviations=deviations,
        seed=seed,
    )


def evaluate_witness(target: Graph | UniformHypergraph, report: DeviationReport) -> float:
    """Recompute the deviation achieved by a report's witness with the exact counting kernels."""
    witness = report.witness
    n, p = report.n, report.p
    if target.n != n:
        raise QuasicutValidationError(f"Report is about {n} vertices but the input has {target.n}")

    match report.property:
        case PropertyTag.P1 | PropertyTag.P2 if isinstance(target, Graph):
            count = edges_within_mask(target, mask_of(witness.vertices, n))
            return normalized_deviation(count, _p1_target(p, len(witness.vertices)), n, 2)

        case PropertyTag.P3 if isinstance(target, Graph):
            return max(p3_components(target, p).values())

        case PropertyTag.HYPERGRAPH_P1 if isinstance(target, UniformHypergraph):
            count = hyperedges_within_mask(target, mask_of(witness.vertices, n))
            expected = _hyper_p1_target(p, len(witness.vertices), target.k)
            return normalized_deviation(count, expected, n, target.k)

        case PropertyTag.CUT_HYPERGRAPH if isinstance(target, UniformHypergraph):
            alpha = parse_alpha(str(report.parameters["alpha"]))
            count = hyperedges_crossing(target, VertexCut(witness.labels, alpha))
            return normalized_deviation(count, cut_target(p, n, target.k, alpha), n, target.k)

        case PropertyTag.CUT_GRAPH | PropertyTag.CLIQUE_CUT if isinstance(target, Graph):
            alpha = parse_alpha(str(report.parameters["alpha"]))
            k = int(report.parameters.get("k", 2))  # type: ignore[call-overload]
            count = cliques_crossing(target, VertexCut(witness.labels, alpha), k)
            return normalized_deviation(count, cut_target(p ** math.comb(k, 2), n, k, alpha), n, k)

        case PropertyTag.REGULARITY if isinstance(target, Graph):
            return pair_deviation(target, report)

    raise QuasicutValidationError(f"Cannot evaluate a `{report.property}` witness against this input")
