from __future__ import annotations

from collections.abc import Callable
from fractions import Fraction
from itertools import combinations

import pytest

from quasicut.checks.properties import (
    check_clique_cut,
    check_cut_graph,
    check_cut_hypergraph,
    check_hypergraph_p1,
    check_p1,
    check_p2,
    check_p3,
    evaluate_witness,
    subset_concentration,
)
from quasicut.checks.regularity import reduced_graph, regularity_deviation
from quasicut.checks.report import CheckMode, DeviationReport, PropertyTag
from quasicut.core.configuration import ToolkitConfig, set_toolkit_config
from quasicut.core.errors import QuasicutValidationError
from quasicut.core.utils import balanced_alpha
from quasicut.generators.random_graphs import gen_complete_hypergraph, gen_gnp, gen_half_split
from quasicut.graphs.counting import clique_hypergraph
from quasicut.graphs.graph import Graph, UniformHypergraph
from quasicut.pipeline.batteries import naive_edges_within

HALVES = balanced_alpha(2)
THIRDS = balanced_alpha(3)


def brute_force_subset_deviation(g: Graph, p: float, sizes: range) -> float:
    best = 0.0
    for size in sizes:
        for chosen in combinations(range(g.n), size):
            best = max(best, abs(naive_edges_within(g, chosen) - p * size * size / 2) / g.n**2)
    return best


def test_exhaustive_p1_matches_brute_force():
    g = gen_gnp(9, 0.5, seed=4)
    report = check_p1(g, 0.5, budget=10, seed=0)
    assert report.mode == CheckMode.EXHAUSTIVE
    assert report.samples == 2**9
    assert report.max_abs_deviation == pytest.approx(brute_force_subset_deviation(g, 0.5, range(10)), abs=1e-15)


def test_exhaustive_p2_matches_brute_force():
    g = gen_gnp(10, 0.4, seed=6)
    report = check_p2(g, 0.4, 0.5, budget=10, seed=0)
    assert report.mode == CheckMode.EXHAUSTIVE
    assert report.samples == 252
    assert report.max_abs_deviation == pytest.approx(brute_force_subset_deviation(g, 0.4, range(5, 6)), abs=1e-15)


def test_p2_rejects_tiny_subsets():
    with pytest.raises(QuasicutValidationError):
        check_p2(Graph.complete(5), 0.5, 0.2, budget=10, seed=0)


def test_p3_on_complete_graph():
    report = check_p3(Graph.complete(10), 1.0)
    assert report.mode == CheckMode.CLOSED_FORM
    assert report.components["edges"] == pytest.approx(0.05)
    assert report.components["c4"] == pytest.approx((1250 - 630) / 10**4)
    assert report.max_abs_deviation == pytest.approx(0.062)


def test_clique_cut_with_edges_equals_cut_graph():
    g = gen_gnp(8, 0.5, seed=2)
    edges = check_cut_graph(g, 0.5, HALVES, budget=100, seed=1)
    cliques = check_clique_cut(g, 0.5, 2, HALVES, budget=100, seed=1)
    assert edges.mode == CheckMode.EXHAUSTIVE
    assert edges.samples == 70
    assert cliques.max_abs_deviation == edges.max_abs_deviation
    assert cliques.witness == edges.witness


def test_clique_cut_needs_enough_parts():
    with pytest.raises(QuasicutValidationError):
        check_clique_cut(Graph.complete(6), 1.0, 3, HALVES, budget=10, seed=0)


def test_complete_hypergraph_has_no_cut_deviation():
    h = gen_complete_hypergraph(6, 3)
    report = check_cut_hypergraph(h, 1.0, THIRDS, budget=10, seed=0)
    assert report.mode == CheckMode.EXHAUSTIVE
    assert report.max_abs_deviation == pytest.approx(0.0, abs=1e-12)


def test_complete_hypergraph_p1():
    report = check_hypergraph_p1(gen_complete_hypergraph(6, 3), 1.0, budget=10, seed=0)
    assert report.mode == CheckMode.EXHAUSTIVE
    assert report.max_abs_deviation == pytest.approx(16 / 216)
    assert len(report.witness.vertices) == 6


def _reports() -> list[tuple[str, Callable[[], tuple[Graph | UniformHypergraph, DeviationReport]]]]:
    g = gen_gnp(30, 0.5, seed=12)
    small = gen_gnp(12, 0.5, seed=13)
    lift = clique_hypergraph(gen_gnp(24, 0.6, seed=14), 3)
    return [
        ("p1-sampled", lambda: (g, check_p1(g, 0.5, 2000, 1))),
        ("p1-exhaustive", lambda: (small, check_p1(small, 0.5, 10, 1))),
        ("p2-sampled", lambda: (g, check_p2(g, 0.5, 0.5, 2000, 1))),
        ("p3", lambda: (g, check_p3(g, 0.5))),
        ("cut-sampled", lambda: (g, check_cut_graph(g, 0.5, THIRDS, 500, 1))),
        ("cut-exhaustive", lambda: (small, check_cut_graph(small, 0.5, HALVES, 500, 1))),
        ("clique-cut", lambda: (g, check_clique_cut(g, 0.5, 3, THIRDS, 200, 1))),
        ("hyper-cut", lambda: (lift, check_cut_hypergraph(lift, 0.2, THIRDS, 200, 1))),
        ("hyper-p1", lambda: (lift, check_hypergraph_p1(lift, 0.2, 500, 1))),
        ("regularity", lambda: (g, regularity_deviation(g, range(15), range(15, 30), 0.25, 40, 1))),
    ]


@pytest.mark.parametrize(("name", "build"), _reports(), ids=[name for name, _ in _reports()])
def test_witness_reproduces_reported_deviation(name: str, build):
    target, report = build()
    assert evaluate_witness(target, report) == report.max_abs_deviation, name
    assert evaluate_witness(target, DeviationReport.from_dict(report.to_dict())) == report.max_abs_deviation


def test_witness_on_wrong_input_is_rejected():
    report = check_p1(gen_gnp(12, 0.5, seed=1), 0.5, 10, 0)
    with pytest.raises(QuasicutValidationError):
        evaluate_witness(gen_gnp(13, 0.5, seed=1), report)


@pytest.mark.parametrize(
    "check",
    [
        lambda g, budget: check_p1(g, 0.5, budget, 5),
        lambda g, budget: check_p2(g, 0.5, 0.5, budget, 5),
        lambda g, budget: check_cut_graph(g, 0.5, THIRDS, budget, 5),
    ],
)
def test_larger_budget_never_lowers_the_deviation(check):
    g = gen_gnp(40, 0.5, seed=8)
    assert check(g, 3000).max_abs_deviation >= check(g, 500).max_abs_deviation


def test_sampled_checks_do_not_depend_on_worker_count():
    g = gen_gnp(40, 0.5, seed=8)
    single = [check_p1(g, 0.5, 3000, 2).to_dict(), check_cut_graph(g, 0.5, HALVES, 3000, 2).to_dict()]
    set_toolkit_config(ToolkitConfig(workers=4))
    assert [check_p1(g, 0.5, 3000, 2).to_dict(), check_cut_graph(g, 0.5, HALVES, 3000, 2).to_dict()] == single


def test_sampled_reports_are_flagged_as_lower_bounds():
    report = check_cut_graph(gen_gnp(40, 0.5, seed=8), 0.5, THIRDS, 100, 0)
    assert report.mode == CheckMode.SAMPLED
    assert "lower_bound" in report.flags
    assert report.samples == 101


def test_half_split_separates_cut_property_from_p1():
    g = gen_half_split(200, 0.3, seed=3)
    cut = check_cut_graph(g, 0.3, HALVES, 500, 0)
    subsets = check_p1(g, 0.3, 500, 0)
    assert cut.passes_at_most(0.02)
    assert subsets.passes_at_least(0.03)


def test_subset_concentration_on_random_graph():
    report = subset_concentration(gen_gnp(500, 0.5, seed=1), 0.5, 50, 0.02, 7)
    assert report.trials == 50
    assert len(report.deviations) == 50
    assert report.passed >= 40


@pytest.mark.parametrize("alpha", [0.0, 1.5])
def test_subset_concentration_rejects_bad_alpha(alpha: float):
    with pytest.raises(QuasicutValidationError):
        subset_concentration(Graph.complete(5), alpha, 3, 0.1, 0)


def test_regularity_detects_a_dense_corner():
    edges = [(x, y) for x in range(10) for y in range(20, 40)]
    g = Graph.from_edges(40, edges)
    report = regularity_deviation(g, range(20), range(20, 40), 0.25, 10, 0)
    assert report.property == PropertyTag.REGULARITY
    assert report.max_abs_deviation == pytest.approx(0.5)


def test_regularity_rejects_small_sides():
    with pytest.raises(QuasicutValidationError):
        regularity_deviation(Graph.complete(6), range(3), range(3, 6), 0.25, 5, 0)


def test_random_pair_is_nearly_regular():
    g = gen_gnp(200, 0.5, seed=5)
    assert regularity_deviation(g, range(100), range(100, 200), 0.25, 50, 0).max_abs_deviation < 0.15


def test_reduced_graph_of_random_graph_is_complete():
    g = gen_gnp(240, 0.5, seed=5)
    parts = [range(i * 60, (i + 1) * 60) for i in range(4)]
    reduced = reduced_graph(g, parts, 0.25, 30, 0)
    assert reduced.irregular_pairs == 0
    assert reduced.min_degree == 3
    assert reduced.meets_degree_condition
    assert reduced.as_graph() == Graph.complete(4)


def test_report_to_dict_round_trip_keeps_alpha():
    report = check_cut_graph(gen_gnp(8, 0.5, seed=1), 0.5, (Fraction(1, 4), Fraction(3, 4)), 10, 0)
    assert DeviationReport.from_dict(report.to_dict()) == report
