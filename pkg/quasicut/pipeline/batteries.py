from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from quasicut.core.logging import get_logger
from quasicut.core.parallel import first_argmax, ordered_map
from quasicut.core.utils import balanced_alpha, derive_seed, make_rng
from quasicut.generators.cuts import enumerate_balanced_cuts
from quasicut.generators.random_graphs import gen_gnp, gen_min_degree, gen_planted_structure
from quasicut.graphs.counting import (
    clique_hypergraph,
    cliques_crossing,
    count_c4,
    crossing_edges,
    edges_between,
    edges_within_mask,
    hyperedges_crossing,
    partition_stats,
    triangles_crossing,
)
from quasicut.graphs.graph import Graph, PartitionStats
from quasicut.linalg.density_space import DensityVectorK, distance_to_W, u_vector
from quasicut.linalg.exact import rank_exact
from quasicut.linalg.families import colex_subsets, inclusion_matrix, reduced_crossing_matrix
from quasicut.structure.classifier import VerdictTag, classify_structure
from quasicut.structure.factor import clique_factor
from quasicut.structure.residuals import substitution_check

_logcore = get_logger(__name__)


@dataclass(frozen=True, kw_only=True)
class BatteryCase:
    label: str
    ok: bool
    value: float = 0.0
    details: dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict[str, object]:
        return {"label": self.label, "ok": self.ok, "value": self.value, **self.details}


@dataclass(frozen=True, kw_only=True)
class BatteryResult:
    """Outcome of a battery of independent cases; it passes when no case fails."""

    name: str
    cases: tuple[BatteryCase, ...]

    @property
    def failures(self) -> tuple[BatteryCase, ...]:
        return tuple(case for case in self.cases if not case.ok)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def worst(self) -> BatteryCase | None:
        if not self.cases:
            return None

        return self.cases[first_argmax([case.value for case in self.cases])]

    def to_dict(self) -> dict[str, object]:
        worst = self.worst
        return {
            "battery": self.name,
            "cases": len(self.cases),
            "failures": [case.to_dict() for case in self.failures],
            "worst": worst.to_dict() if worst is not None else None,
            "results": [case.to_dict() for case in self.cases],
        }


def _finish(name: str, cases: Sequence[BatteryCase]) -> BatteryResult:
    result = BatteryResult(name=name, cases=tuple(cases))
    _logcore.debug(
        "Battery {name}: {failed} of {total} cases failed",
        name=name,
        failed=len(result.failures),
        total=len(result.cases),
    )
    return result


# --------------------------------------------------------------------------- naive counters


def naive_edges_within(g: Graph, vertices: Sequence[int]) -> int:
    return sum(1 for u, v in combinations(vertices, 2) if g.has_edge(u, v))


def naive_edges_between(g: Graph, xs: int, ys: int) -> int:
    return sum(1 for u in range(g.n) for v in range(g.n) if (xs >> u) & 1 and (ys >> v) & 1 and g.has_edge(u, v))


def naive_cliques(g: Graph, k: int) -> list[tuple[int, ...]]:
    return [
        subset
        for subset in combinations(range(g.n), k)
        if all(g.has_edge(u, v) for u, v in combinations(subset, 2))
    ]


def naive_crossing(cliques: Sequence[tuple[int, ...]], labels: Sequence[int]) -> int:
    return sum(1 for clique in cliques if len({labels[v] for v in clique}) == len(clique))


def naive_c4(g: Graph) -> int:
    count = 0
    for a, b, c, d in combinations(range(g.n), 4):
        for w, x, y, z in ((a, b, c, d), (a, b, d, c), (a, c, b, d)):
            if g.has_edge(w, x) and g.has_edge(x, y) and g.has_edge(y, z) and g.has_edge(z, w):
                count += 1

    return count


def _oracle_case(index: int, seed: int) -> BatteryCase:
    n = 6 + index % 4
    p = (0.3, 0.5, 0.7)[index % 3]
    g = gen_gnp(n, p, seed)
    edges = naive_cliques(g, 2)
    triangles = naive_cliques(g, 3)
    quadruples = naive_cliques(g, 4)
    lift = clique_hypergraph(g, 3)
    full = (1 << n) - 1
    evens = sum(1 << v for v in range(0, n, 2))

    mismatches: list[str] = []
    if count_c4(g) != naive_c4(g):
        mismatches.append("c4")

    for mask in range(1 << n):
        vertices = [v for v in range(n) if (mask >> v) & 1]
        if edges_within_mask(g, mask) != naive_edges_within(g, vertices):
            mismatches.append(f"edges_within:{mask}")
            break

        others = full & ~mask
        if any(edges_between(g, mask, ys) != naive_edges_between(g, mask, ys) for ys in (others, others & evens)):
            mismatches.append(f"edges_between:{mask}")
            break

    cuts = 0
    # balanced 4-cuts only up to n = 8
    for r in (2, 3, 4) if n <= 8 else (2, 3):
        for cut in enumerate_balanced_cuts(n, balanced_alpha(r)):
            cuts += 1
            expected_triangles = naive_crossing(triangles, cut.labels)
            if crossing_edges(g, cut) != naive_crossing(edges, cut.labels):
                mismatches.append(f"crossing_edges:{r}")
            if triangles_crossing(g, cut) != expected_triangles:
                mismatches.append(f"triangles_crossing:{r}")
            if hyperedges_crossing(lift, cut) != expected_triangles:
                mismatches.append(f"hyperedges_crossing:{r}")
            if cliques_crossing(g, cut, 4) != naive_crossing(quadruples, cut.labels):
                mismatches.append(f"cliques_crossing_4:{r}")
            if mismatches:
                break

    return BatteryCase(
        label=f"graph-{index}",
        ok=not mismatches,
        value=float(len(mismatches)),
        details={"n": n, "p": p, "cuts": cuts, "mismatches": mismatches},
    )


def oracle_equivalence(count: int, seed: int) -> BatteryResult:
    """Counting kernels against naive enumeration on small random graphs.

    Cut kernels run over every balanced 2- and 3-cut, and over balanced 4-cuts up to n = 8.
    """
    indices = list(range(count))
    cases = ordered_map(lambda index: _oracle_case(index, derive_seed(seed, "graph", str(index))), indices)
    return _finish("oracle_equivalence", cases)


# --------------------------------------------------------------------------- exact rank sweeps


def inclusion_rank_sweep(t_max: int, seed: int) -> BatteryResult:
    """``rank B(t, h, k) = C(t, k)`` for every ``2 <= k <= h`` with ``h + k <= t <= t_max``."""
    triples = [
        (t, h, k)
        for t in range(4, t_max + 1)
        for k in range(2, t // 2 + 1)
        for h in range(k, t - k + 1)
    ]

    def run(triple: tuple[int, int, int]) -> BatteryCase:
        t, h, k = triple
        rank = rank_exact(inclusion_matrix(t, h, k), seed=seed)
        expected = math.comb(t, k)
        return BatteryCase(
            label=f"B({t},{h},{k})",
            ok=rank == expected,
            value=float(expected - rank),
            details={"rank": rank, "expected": expected},
        )

    return _finish("inclusion_rank_sweep", ordered_map(run, triples))


def crossing_rank_triples(
    t_max: int,
    ks: Sequence[int] = (3, 4),
    *,
    in_range: bool = True,
) -> list[tuple[int, int, int]]:
    """``(t, r, k)`` with ``r | t`` and ``k <= r``, split by whether ``k <= 2t/r``."""
    return [
        (t, r, k)
        for t in range(2, t_max + 1)
        for r in range(2, t + 1)
        if t % r == 0
        for k in ks
        if k <= r and (2 * t // r >= k) == in_range
    ]


def crossing_rank_sweep(t_max: int, seed: int, ks: Sequence[int] = (3, 4)) -> BatteryResult:
    """Full column rank ``C(t-2, k-2)`` of the deduplicated crossing matrix over its admissible range.

    Triples with ``k > 2t/r`` are measured and reported with ``in_range`` false; they never fail the battery.
    """

    def run(item: tuple[tuple[int, int, int], bool]) -> BatteryCase:
        (t, r, k), in_range = item
        matrix = reduced_crossing_matrix(t, r, k)
        rank = rank_exact(matrix, seed=seed)
        expected = math.comb(t - 2, k - 2)
        if not in_range:
            _logcore.debug("N({t},{r},{k}) outside the full-rank range has rank {rank}", t=t, r=r, k=k, rank=rank)

        return BatteryCase(
            label=f"N({t},{r},{k})",
            ok=rank == expected or not in_range,
            value=float(expected - rank) if in_range else 0.0,
            details={"rank": rank, "expected": expected, "rows": matrix.shape[0], "in_range": in_range},
        )

    items = [(triple, True) for triple in crossing_rank_triples(t_max, ks)]
    items += [(triple, False) for triple in crossing_rank_triples(t_max, ks, in_range=False)]
    return _finish("crossing_rank_sweep", ordered_map(run, items))


# --------------------------------------------------------------------------- structure batteries


def _consecutive_parts(t: int, m: int) -> list[range]:
    return [range(i * m, (i + 1) * m) for i in range(t)]


def classifier_battery(
    count: int,
    seed: int,
    *,
    t: int = 8,
    m: int = 400,
    x: float = 0.25,
    y: float = 0.36,
    p: float = 0.5,
    tol: float = 0.02,
) -> BatteryResult:
    """Recover the planted special part and densities, and report uniform structure on random blocks."""

    def planted(index: int) -> BatteryCase:
        s = index % t
        g, parts = gen_planted_structure(t, m, s, x, y, derive_seed(seed, "planted", str(index)))
        verdict = classify_structure(partition_stats(g, parts), tol)
        errors = (
            abs(math.sqrt(verdict.x or 0.0) - math.sqrt(x)),
            abs(math.sqrt(verdict.y or 0.0) - math.sqrt(y)),
        )
        return BatteryCase(
            label=f"planted-{index}",
            ok=verdict.tag == VerdictTag.SPECIAL_VERTEX and verdict.s == s and max(errors) <= tol,
            value=max(errors),
            details={"tag": str(verdict.tag), "s": s, "found_s": verdict.s},
        )

    def uniform(index: int) -> BatteryCase:
        g = gen_gnp(t * m, p, derive_seed(seed, "uniform", str(index)))
        verdict = classify_structure(partition_stats(g, _consecutive_parts(t, m)), tol)
        return BatteryCase(
            label=f"uniform-{index}",
            ok=verdict.tag == VerdictTag.UNIFORM,
            value=verdict.residuals["uniform"],
            details={"tag": str(verdict.tag), "p_prime": verdict.p_prime},
        )

    cases = ordered_map(planted, list(range(count))) + ordered_map(uniform, list(range(count)))
    return _finish("classifier_battery", cases)


def random_profile(rng: np.random.Generator, t: int, low: float = 0.05) -> PartitionStats:
    x = rng.uniform(low, 1.0, t)
    upper = np.triu(rng.uniform(low, 1.0, (t, t)), k=1)
    return PartitionStats.from_targets(x, upper + upper.T)


def substitution_battery(count: int, seed: int, *, ks: Sequence[int] = (4, 5, 6), tol: float = 1e-12) -> BatteryResult:
    """Both substitution identities on random positive profiles of ``k`` parts, with a random absorbed set."""

    def run(k: int) -> BatteryCase:
        rng = make_rng(derive_seed(seed, "k", str(k)))
        worst = 0.0
        for _ in range(count):
            stats = random_profile(rng, k)
            order = [int(v) for v in rng.permutation(k)]
            check = substitution_check(stats, order[: k - 3], order[-3], order[-2], order[-1])
            worst = max(worst, check.cycle_error, check.side_error)

        return BatteryCase(label=f"k={k}", ok=worst <= tol, value=worst, details={"profiles": count})

    return _finish("substitution_battery", ordered_map(run, list(ks)))


def membership_battery(t: int, k: int, ps: Sequence[float], *, tol: float = 1e-10) -> BatteryResult:
    """Every generator vector and the constant vector ``p`` lie in the affine hull, up to ``tol``."""
    jobs: list[tuple[float, tuple[int, ...] | None]] = []
    for p in ps:
        jobs.extend((p, half) for half in colex_subsets(t, t // 2))
        jobs.append((p, None))

    def run(job: tuple[float, tuple[int, ...] | None]) -> BatteryCase:
        p, half = job
        if half is None:
            vector, label = DensityVectorK.constant(t, k, p), f"constant@{p}"
        else:
            vector, label = u_vector(t, k, p, half), f"u{list(half)}@{p}"

        residual = distance_to_W(vector, p).linf_residual
        return BatteryCase(label=label, ok=residual <= tol, value=residual)

    return _finish("membership_battery", ordered_map(run, jobs))


def factor_battery(count: int, seed: int, *, n: int = 12, k: int = 3, min_degree: int = 8) -> BatteryResult:
    """Clique factors on random graphs whose minimum degree is enforced by construction."""

    def run(index: int) -> BatteryCase:
        g = gen_min_degree(n, min_degree, derive_seed(seed, "graph", str(index)))
        factor = clique_factor(g, k)
        return BatteryCase(
            label=f"graph-{index}",
            ok=factor.found and g.min_degree() >= min_degree,
            value=float(not factor.found),
            details={"status": str(factor.status), "nodes": factor.nodes, "min_degree": g.min_degree()},
        )

    return _finish("factor_battery", ordered_map(run, list(range(count))))
