from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasicut.core.errors import QuasicutBudgetError, QuasicutValidationError
from quasicut.core.utils import make_rng
from quasicut.generators.random_graphs import gen_gnp, gen_min_degree, gen_planted_structure, planted_targets
from quasicut.graphs.counting import partition_stats
from quasicut.graphs.graph import Graph, PartitionStats
from quasicut.pipeline.batteries import classifier_battery, factor_battery, random_profile, substitution_battery
from quasicut.structure.classifier import VerdictTag, classify_structure
from quasicut.structure.excellent import excellent_analysis
from quasicut.structure.factor import FactorStatus, clique_factor, factor_structure
from quasicut.structure.residuals import (
    clique_pair_residual,
    general_triple_residual,
    implied_within_densities,
    oriented_residual,
    residual_matrix,
    substitution_check,
    transform_densities,
    triple_residual,
)
from quasicut.structure.swap import predicted_d12k, predicted_d_prime, predicted_d_prime_vector, swap_experiment

densities = st.floats(min_value=0.05, max_value=1.0, allow_nan=False)


def planted_stats(t: int, s: int, x: float = 0.25, y: float = 0.36) -> PartitionStats:
    within, pairs = planted_targets(t, s, x, y)
    return PartitionStats.from_targets(within, pairs)


def uniform_stats(t: int, level: float) -> PartitionStats:
    return PartitionStats.from_targets(np.full(t, level), np.full((t, t), level))


# --------------------------------------------------------------------------- residuals


def test_triple_residual_vanishes_on_uniform_densities():
    assert triple_residual(0.4, 0.4, 0.4, 0.4, 0.4) == pytest.approx(0.0)


@pytest.mark.parametrize(("t", "s"), [(4, 0), (6, 2), (8, 7)])
def test_planted_targets_have_zero_residuals(t: int, s: int):
    summary = residual_matrix(planted_stats(t, s))
    assert summary.max_abs < 1e-12
    assert summary.triples == math.comb(t, 3)


def test_residual_matrix_finds_the_broken_triple():
    stats = uniform_stats(5, 0.5)
    x = stats.x.copy()
    x[3] = 0.9
    summary = residual_matrix(PartitionStats.from_targets(x, stats.d))
    assert summary.max_abs == pytest.approx(0.4 * 0.25)
    assert 3 in summary.worst_triple[:2]


def test_residual_matrix_needs_three_parts():
    with pytest.raises(QuasicutValidationError):
        residual_matrix(uniform_stats(2, 0.5))


@given(densities, densities, densities)
@settings(max_examples=100, deadline=None)
def test_implied_within_densities_closed_form(d12: float, d13: float, d23: float):
    x1, x2, x3 = implied_within_densities(d12, d13, d23)
    assert x1 == pytest.approx(d23 * (d12**2 + d13**2 - d23**2) / (d12 * d13), rel=1e-9, abs=1e-9)
    assert x2 == pytest.approx(d13 * (d12**2 + d23**2 - d13**2) / (d12 * d23), rel=1e-9, abs=1e-9)

    stats = PartitionStats.from_targets([x1, x2, x3], [[0, d12, d13], [d12, 0, d23], [d13, d23, 0]])
    for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        assert oriented_residual(stats, i, j, k) == pytest.approx(0.0, abs=1e-9)


def test_implied_within_densities_need_positive_pairs():
    with pytest.raises(QuasicutValidationError):
        implied_within_densities(0.5, 0.0, 0.5)


@given(st.integers(min_value=4, max_value=7), st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_substitution_identities_hold_on_random_profiles(k: int, seed: int):
    rng = make_rng(seed)
    stats = random_profile(rng, k)
    order = [int(v) for v in rng.permutation(k)]
    check = substitution_check(stats, order[: k - 3], order[-3], order[-2], order[-1])
    assert check.cycle_error < 1e-12
    assert check.side_error < 1e-12


def test_transform_densities():
    stats = random_profile(make_rng(6), 5)
    identity = transform_densities(stats, (), (0, 1, 2))
    assert identity.x[1] == pytest.approx(stats.x[1])
    assert identity.pair(0, 2) == pytest.approx(stats.d[0, 2])

    absorbed = transform_densities(uniform_stats(5, 0.5), (4,), (0, 1, 2))
    assert absorbed.x[0] == pytest.approx(0.25)
    assert absorbed.pair(1, 2) == pytest.approx(0.25)

    with pytest.raises(QuasicutValidationError):
        transform_densities(stats, (0,), (0, 1, 2))


def test_general_residual_reduces_to_clique_pair_residual():
    stats = random_profile(make_rng(4), 5)
    base = (0, 4)
    lhs = general_triple_residual(stats, base, 1, 2, 3)
    assert lhs == pytest.approx(clique_pair_residual(stats, (0, 1, 2, 3, 4), 1, 2), rel=1e-9)


def test_substitution_needs_positive_densities():
    stats = uniform_stats(4, 0.5)
    d = stats.d.copy()
    d[0, 1] = d[1, 0] = 0.0
    with pytest.raises(QuasicutValidationError):
        substitution_check(PartitionStats.from_targets(stats.x, d), (0,), 1, 2, 3)


def test_substitution_battery():
    result = substitution_battery(200, seed=1)
    assert result.passed
    assert [case.label for case in result.cases] == ["k=4", "k=5", "k=6"]


# --------------------------------------------------------------------------- swaps


def test_predicted_d12k_endpoints():
    assert predicted_d12k(0.3, 0.7, 0.5, 0.4, 0.6, 0.0) == pytest.approx(0.5 * 0.4 * 0.6)
    assert predicted_d12k(0.3, 0.7, 0.5, 0.4, 0.6, 1.0) == pytest.approx(0.5 * 0.4 * 0.6)


def test_predicted_d_prime_only_touches_subsets_with_both_parts():
    stats = random_profile(make_rng(2), 5)
    assert predicted_d_prime(stats, (0, 2, 3), 0, 1, 0.5) == 0.0
    vector = predicted_d_prime_vector(stats, 3, 0, 1, 0.5)
    assert vector[(0, 2, 3)] == 0.0
    expected = 0.25 * clique_pair_residual(stats, (0, 1, 2), 0, 1)
    assert vector[(0, 1, 2)] == pytest.approx(expected)


def test_swap_at_zero_has_no_response():
    g = gen_gnp(120, 0.5, seed=3)
    parts = [range(i * 30, (i + 1) * 30) for i in range(4)]
    outcome = swap_experiment(g, parts, 0, 1, 0.0, seed=1)
    assert outcome.realized_alpha == 0.0
    assert outcome.moved_from_first == ()
    assert np.allclose(outcome.d_prime.values, 0.0)


def test_full_swap_exchanges_the_parts():
    g = gen_gnp(120, 0.5, seed=3)
    parts = [range(i * 30, (i + 1) * 30) for i in range(4)]
    outcome = swap_experiment(g, parts, 0, 1, 1.0, seed=1)
    assert outcome.realized_alpha == 1.0
    assert np.allclose(outcome.d_prime.values, 0.0)
    assert outcome.d_alpha.values.tolist() == outcome.d_one.values.tolist()


def test_swap_rejects_bad_arguments():
    g = gen_gnp(40, 0.5, seed=3)
    parts = [range(i * 10, (i + 1) * 10) for i in range(4)]
    with pytest.raises(QuasicutValidationError):
        swap_experiment(g, parts, 1, 1, 0.5, seed=0)

    with pytest.raises(QuasicutValidationError):
        swap_experiment(g, parts, 0, 1, 0.05, seed=0)

    with pytest.raises(QuasicutValidationError):
        swap_experiment(g, parts, 0, 1, 0.5, seed=0, k=5)


@pytest.mark.slow
def test_swap_on_planted_structure_follows_prediction():
    g, parts = gen_planted_structure(6, 200, 0, 0.25, 0.36, seed=5)
    outcome = swap_experiment(g, parts, 0, 1, 0.5, seed=2)
    predicted = predicted_d_prime_vector(partition_stats(g, parts), 3, 0, 1, outcome.realized_alpha)
    assert np.max(np.abs(outcome.d_prime.values - predicted.values)) < 0.03


# --------------------------------------------------------------------------- classification


@pytest.mark.parametrize(("t", "s"), [(4, 1), (8, 3), (10, 9)])
def test_classifier_recovers_planted_targets(t: int, s: int):
    verdict = classify_structure(planted_stats(t, s), 1e-9)
    assert verdict.tag == VerdictTag.SPECIAL_VERTEX
    assert verdict.s == s
    assert verdict.x == pytest.approx(0.25)
    assert verdict.y == pytest.approx(0.36)


def test_classifier_reports_uniform_profiles():
    verdict = classify_structure(uniform_stats(6, 0.4), 1e-9)
    assert verdict.tag == VerdictTag.UNIFORM
    assert verdict.p_prime == pytest.approx(0.4)


def test_classifier_reports_unstructured_profiles():
    stats = random_profile(make_rng(9), 6, low=0.1)
    assert classify_structure(stats, 0.01).tag == VerdictTag.UNSTRUCTURED


def test_classifier_needs_four_parts():
    with pytest.raises(QuasicutValidationError):
        classify_structure(uniform_stats(3, 0.5), 0.1)


@pytest.mark.slow
def test_classifier_battery():
    result = classifier_battery(4, seed=0, t=6, m=300)
    assert result.passed
    assert len(result.cases) == 8


def test_excellent_tuples_of_a_uniform_profile():
    analysis = excellent_analysis(uniform_stats(6, 0.5), 4, 1e-9)
    assert analysis.tuples_checked == 15
    assert analysis.excellent_fraction == 1.0
    assert len(analysis.excellent_pairs) == 15
    assert analysis.max_excellent_spread == 0.0


def test_excellent_tuples_avoid_the_special_part():
    analysis = excellent_analysis(planted_stats(6, 0), 4, 1e-6)
    assert analysis.excellent_tuples
    assert all(0 not in subset for subset in analysis.excellent_tuples)
    assert analysis.max_excellent_spread == pytest.approx(0.0, abs=1e-12)


def test_excellent_analysis_validates_k():
    with pytest.raises(QuasicutValidationError):
        excellent_analysis(uniform_stats(6, 0.5), 2, 0.1)


# --------------------------------------------------------------------------- factors


def test_clique_factor_of_disjoint_triangles():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    factor = clique_factor(g, 3)
    assert factor.status == FactorStatus.FOUND
    assert factor.cliques == ((0, 1, 2), (3, 4, 5))


def test_clique_factor_absent():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5)])
    assert clique_factor(g, 3).status == FactorStatus.NONE


def test_clique_factor_budget():
    assert clique_factor(Graph.complete(12), 3, node_budget=1).status == FactorStatus.BUDGET_EXCEEDED
    assert clique_factor(Graph.from_edges(9, [(0, 1)]), 3, node_budget=0).status == FactorStatus.BUDGET_EXCEEDED


def test_clique_factor_input_checks():
    with pytest.raises(QuasicutValidationError):
        clique_factor(Graph.complete(7), 3)

    with pytest.raises(QuasicutBudgetError):
        clique_factor(Graph.complete(36), 3)


@pytest.mark.parametrize("seed", range(10))
def test_minimum_degree_forces_a_triangle_factor(seed: int):
    factor = clique_factor(gen_min_degree(12, 8, seed), 3)
    assert factor.found
    covered = sorted(v for clique in factor.cliques for v in clique)
    assert covered == list(range(12))


def test_factor_battery():
    result = factor_battery(5, seed=0)
    assert result.passed


def test_factor_structure_of_planted_targets():
    stats = planted_stats(8, 5)
    structure = factor_structure(stats, Graph.complete(8), 1e-9)
    assert structure.factor.found
    assert len(structure.verdicts) == 2
    assert structure.special_cliques == 1
    assert structure.unstructured_cliques == 0
    assert structure.consensus_density == pytest.approx(0.5)
    assert structure.min_pair_density == pytest.approx(0.5)


def test_factor_structure_needs_matching_reduced_graph():
    with pytest.raises(QuasicutValidationError):
        factor_structure(planted_stats(8, 5), Graph.complete(4), 0.1)
