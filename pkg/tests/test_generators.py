from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from quasicut.core.configuration import ToolkitConfig, set_toolkit_config
from quasicut.core.errors import QuasicutBudgetError, QuasicutInfeasibleError, QuasicutValidationError
from quasicut.core.utils import balanced_alpha, derive_seed
from quasicut.generators.cuts import count_cuts, enumerate_balanced_cuts, sample_balanced_cut
from quasicut.generators.random_graphs import (
    gen_complete_hypergraph,
    gen_gnp,
    gen_half_split,
    gen_min_degree,
    gen_planted_structure,
    gen_tripartite,
    generate,
    planted_targets,
)
from quasicut.generators.spec import GenFamily, GenSpec
from quasicut.graphs.counting import edges_within, partition_stats


def test_gnp_is_deterministic_in_the_seed():
    assert gen_gnp(120, 0.4, seed=7) == gen_gnp(120, 0.4, seed=7)
    assert gen_gnp(120, 0.4, seed=7) != gen_gnp(120, 0.4, seed=8)


def test_gnp_does_not_depend_on_worker_count():
    single = gen_gnp(600, 0.5, seed=21)
    set_toolkit_config(ToolkitConfig(workers=4))
    assert gen_gnp(600, 0.5, seed=21) == single


def test_gnp_density_is_close_to_p():
    g = gen_gnp(400, 0.3, seed=1)
    assert g.m / math.comb(400, 2) == pytest.approx(0.3, abs=0.01)


@pytest.mark.parametrize(("n", "p"), [(0, 0.5), (10, 1.5), (10, -0.1)])
def test_gnp_rejects_bad_parameters(n: int, p: float):
    with pytest.raises(QuasicutValidationError):
        gen_gnp(n, p, seed=0)


def test_half_split_layout():
    g = gen_half_split(200, 0.3, seed=4)
    assert edges_within(g, range(100, 200)) == 0
    assert edges_within(g, range(100)) / math.comb(100, 2) == pytest.approx(0.6, abs=0.05)


def test_planted_targets_closed_form():
    within, pairs = planted_targets(5, 2, 0.25, 0.36)
    assert within[0] == pytest.approx(0.5)
    assert within[2] == pytest.approx(0.5 * (0.72 - 0.25) / 0.36)
    assert pairs[2, 4] == pytest.approx(0.6)
    assert pairs[0, 1] == pytest.approx(0.5)
    assert np.all(np.diag(pairs) == 0)


@pytest.mark.parametrize(
    ("x", "y"),
    [
        (0.0, 0.36),
        (0.8, 0.3),
        (0.25, 1.2),
        (0.81, 1.0),
    ],
)
def test_planted_structure_infeasible(x: float, y: float):
    with pytest.raises(QuasicutInfeasibleError):
        gen_planted_structure(4, 10, 0, x, y, seed=0)


def test_planted_structure_moves_the_special_part():
    g, parts = gen_planted_structure(6, 150, 4, 0.25, 0.36, seed=9)
    stats = partition_stats(g, parts)
    assert stats.d[4, 0] == pytest.approx(0.6, abs=0.05)
    assert stats.d[1, 2] == pytest.approx(0.5, abs=0.05)
    assert stats.x[4] == pytest.approx(0.5 * (0.72 - 0.25) / 0.36, abs=0.05)


def test_tripartite_has_independent_parts():
    g, parts = gen_tripartite(60, 0.2, 0.5, 0.8, seed=2)
    stats = partition_stats(g, parts)
    assert stats.x.tolist() == [0.0, 0.0, 0.0]
    assert stats.d[1, 2] == pytest.approx(0.8, abs=0.08)


@pytest.mark.parametrize("seed", range(5))
def test_min_degree_generator(seed: int):
    g = gen_min_degree(12, 8, seed)
    assert g.min_degree() >= 8


def test_complete_hypergraph():
    h = gen_complete_hypergraph(7, 3)
    assert h.m == 35


def test_generate_requires_family_parameters():
    with pytest.raises(QuasicutValidationError):
        generate(GenSpec(family=GenFamily.GNP, seed=0, n=10))


def test_generate_records_metadata():
    generated = generate(GenSpec(family=GenFamily.PLANTED_STRUCTURE, seed=3, t=4, m=20, s=1, x=0.25, y=0.36))
    metadata = generated.metadata()
    assert metadata["family"] == "planted_structure"
    assert metadata["vertices"] == 80
    assert metadata["part_boundaries"] == [[0, 20], [20, 40], [40, 60], [60, 80]]


def test_gen_spec_yaml_round_trip():
    spec = GenSpec(family=GenFamily.HALF_SPLIT, seed=5, n=100, p=0.3)
    assert GenSpec.from_yaml(spec.to_yaml()) == spec


@pytest.mark.parametrize(
    ("n", "r", "expected"),
    [
        (6, 2, 20),
        (6, 3, 90),
        (7, 2, 35),
    ],
)
def test_cut_enumeration_counts(n: int, r: int, expected: int):
    alpha = balanced_alpha(r)
    cuts = list(enumerate_balanced_cuts(n, alpha))
    assert count_cuts(n, alpha) == expected
    assert len(cuts) == expected
    assert len({cut.labels for cut in cuts}) == expected


def test_cut_enumeration_respects_budget():
    with pytest.raises(QuasicutBudgetError):
        list(enumerate_balanced_cuts(12, balanced_alpha(3), budget=100))


def test_sampled_cut_has_rounded_sizes():
    alpha = (Fraction(1, 4), Fraction(3, 4))
    cut = sample_balanced_cut(10, alpha, derive_seed(0, "cut"))
    assert cut.sizes() == (3, 7)
