from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasicut.core.errors import QuasicutValidationError
from quasicut.core.utils import balanced_alpha
from quasicut.generators.cuts import enumerate_balanced_cuts
from quasicut.generators.random_graphs import gen_gnp
from quasicut.graphs.counting import (
    clique_density_vector,
    clique_hypergraph,
    cliques_crossing,
    count_c4,
    crossing_edges,
    edges_between,
    edges_within,
    hyperedges_crossing,
    iter_cliques,
    partition_stats,
    triangles_between,
    triangles_crossing,
)
from quasicut.graphs.graph import Graph, VertexCut, part_sizes
from quasicut.graphs.io import format_graph, format_hypergraph, parse_edge_list, read_input, write_graph
from quasicut.pipeline import batteries
from quasicut.pipeline.batteries import naive_c4, naive_cliques, naive_crossing, naive_edges_within

from .conftest import from_networkx, to_networkx


@st.composite
def small_graphs(draw: st.DrawFn, max_n: int = 9) -> Graph:
    n = draw(st.integers(min_value=1, max_value=max_n))
    pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [pair for pair, keep in zip(pairs, chosen, strict=True) if keep])


def test_from_edges_rejects_loops_and_out_of_range():
    with pytest.raises(QuasicutValidationError):
        Graph.from_edges(3, [(1, 1)])

    with pytest.raises(QuasicutValidationError):
        Graph.from_edges(3, [(0, 3)])


def test_graph_rejects_asymmetric_rows():
    with pytest.raises(QuasicutValidationError, match="not symmetric"):
        Graph(2, (0b10, 0))

    assert Graph(2, (0b10, 0b01)).m == 1


def test_complete_and_empty():
    assert Graph.complete(6).m == 15
    assert Graph.empty(6).m == 0
    assert Graph.complete(6).complement() == Graph.empty(6)
    assert Graph.complete(6).min_degree() == 5


def test_adjacency_round_trip():
    g = gen_gnp(40, 0.3, seed=3)
    assert Graph.from_adjacency_matrix(g.to_numpy()) == g
    assert g.to_numpy().sum() == 2 * g.m


@given(small_graphs())
@settings(max_examples=60, deadline=None)
def test_counts_match_networkx(g: Graph):
    reference = to_networkx(g)
    assert g.m == reference.number_of_edges()
    assert g.degrees() == [reference.degree(v) for v in range(g.n)]
    assert len(iter_cliques(g, 3)) == sum(nx.triangles(reference).values()) // 3


@given(small_graphs(), st.data())
@settings(max_examples=60, deadline=None)
def test_edges_within_matches_naive(g: Graph, data: st.DataObject):
    subset = data.draw(st.sets(st.integers(min_value=0, max_value=g.n - 1)))
    assert edges_within(g, subset) == naive_edges_within(g, sorted(subset))
    assert edges_within(g, subset) == to_networkx(g).subgraph(subset).number_of_edges()


@pytest.mark.parametrize(
    ("graph", "expected"),
    [
        (nx.cycle_graph(4), 1),
        (nx.complete_graph(4), 3),
        (nx.complete_bipartite_graph(2, 3), 3),
        (nx.path_graph(5), 0),
        (nx.complete_graph(5), 15),
    ],
)
def test_count_c4_small_graphs(graph: nx.Graph, expected: int):
    g = from_networkx(graph)
    assert count_c4(g) == expected
    assert naive_c4(g) == expected


@given(small_graphs(max_n=8))
@settings(max_examples=40, deadline=None)
def test_count_c4_matches_naive(g: Graph):
    assert count_c4(g) == naive_c4(g)


def test_edges_between_requires_disjoint_sets():
    g = Graph.complete(4)
    assert edges_between(g, [0, 1], [2, 3]) == 4
    with pytest.raises(QuasicutValidationError):
        edges_between(g, [0, 1], [1, 2])


def test_triangles_between_on_complete_tripartite():
    g = from_networkx(nx.complete_multipartite_graph(2, 2, 2))
    assert triangles_between(g, [0, 1], [2, 3], [4, 5]) == 8


@pytest.mark.parametrize("r", [2, 3])
def test_crossing_counts_match_naive_on_every_cut(r: int):
    g = gen_gnp(6, 0.6, seed=11)
    triangles = naive_cliques(g, 3)
    edges = naive_cliques(g, 2)
    lift = clique_hypergraph(g, 3)
    for cut in enumerate_balanced_cuts(6, balanced_alpha(r)):
        assert crossing_edges(g, cut) == naive_crossing(edges, cut.labels)
        assert triangles_crossing(g, cut) == naive_crossing(triangles, cut.labels)
        assert hyperedges_crossing(lift, cut) == triangles_crossing(g, cut)


def test_cliques_crossing_zero_when_k_exceeds_parts():
    g = Graph.complete(6)
    cut = VertexCut.from_parts([[0, 1, 2], [3, 4, 5]])
    assert cliques_crossing(g, cut, 3) == 0
    assert crossing_edges(g, cut) == 9


def test_oracle_battery_passes_on_small_graphs():
    result = batteries.oracle_equivalence(2, seed=0)
    assert result.passed
    assert [case.details["n"] for case in result.cases] == [6, 7]


@pytest.mark.parametrize(
    ("kernel", "tag"),
    [
        ("edges_between", "edges_between:"),
        ("cliques_crossing", "cliques_crossing_4:"),
    ],
)
def test_oracle_battery_catches_a_broken_kernel(monkeypatch: pytest.MonkeyPatch, kernel: str, tag: str):
    monkeypatch.setattr(batteries, kernel, lambda *_args: -1)
    result = batteries.oracle_equivalence(1, seed=0)
    assert not result.passed
    mismatches = result.cases[0].details["mismatches"]
    assert any(mismatch.startswith(tag) for mismatch in mismatches)  # type: ignore[attr-defined]


def test_clique_hypergraph_of_complete_graph():
    h = clique_hypergraph(Graph.complete(6), 3)
    assert h.m == math.comb(6, 3)
    assert h.k == 3


def test_vertex_cut_validation():
    with pytest.raises(QuasicutValidationError):
        VertexCut((0, 0, 0, 1), (Fraction(1, 2), Fraction(1, 2)))

    with pytest.raises(QuasicutValidationError):
        VertexCut.from_parts([[0, 1], [1, 2]])

    cut = VertexCut.from_parts([[2, 0], [1, 3]])
    assert cut.labels == (0, 1, 0, 1)
    assert cut.parts == ((0, 2), (1, 3))
    assert cut.sizes() == (2, 2)


@pytest.mark.parametrize(
    ("n", "alpha", "expected"),
    [
        (7, balanced_alpha(2), (4, 3)),
        (10, balanced_alpha(3), (4, 3, 3)),
        (10, (Fraction(1, 4), Fraction(3, 4)), (3, 7)),
        (9, balanced_alpha(3), (3, 3, 3)),
    ],
)
def test_part_sizes_rounding(n: int, alpha: tuple[Fraction, ...], expected: tuple[int, ...]):
    assert part_sizes(n, alpha) == expected
    assert sum(part_sizes(n, alpha)) == n


def test_partition_stats_on_complete_graph():
    stats = partition_stats(Graph.complete(9), [range(3), range(3, 6), range(6, 9)])
    assert stats.t == 3
    assert stats.m == 3
    assert stats.x.tolist() == [1.0, 1.0, 1.0]
    assert stats.min_pair_density() == 1.0


def test_partition_stats_rejects_unequal_parts():
    with pytest.raises(QuasicutValidationError):
        partition_stats(Graph.complete(5), [range(2), range(2, 5)])


def test_partition_stats_rejects_single_vertex_parts():
    with pytest.raises(QuasicutValidationError, match="at least 2"):
        partition_stats(Graph.complete(3), [[0], [1], [2]])


def test_clique_density_vector_complete_multipartite():
    g = from_networkx(nx.complete_multipartite_graph(3, 3, 3, 3))
    parts = [range(i * 3, i * 3 + 3) for i in range(4)]
    density = clique_density_vector(g, parts, 3)
    assert density.values.tolist() == [1.0] * 4


def test_parse_edge_list_with_comments_and_relabeling():
    loaded = parse_edge_list("# triangle\n3 3\n10 20\n20 30\n10 30\n")
    assert loaded.graph is not None
    assert loaded.graph.m == 3
    assert loaded.relabeling is not None


@pytest.mark.parametrize(
    "text",
    [
        "",
        "3 2\n0 1\n",
        "3 1\n0 x\n",
        "3 2\n0 1\n1 0\n",
        "4\n0 1\n",
    ],
)
def test_parse_edge_list_rejects_malformed_input(text: str):
    with pytest.raises(QuasicutValidationError):
        parse_edge_list(text)


def test_hypergraph_edge_list():
    loaded = parse_edge_list("5 2 3\n0 1 2\n2 3 4\n")
    assert loaded.graph is None
    assert loaded.hypergraph is not None
    assert loaded.hypergraph.sorted_edges() == [(0, 1, 2), (2, 3, 4)]
    assert parse_edge_list(format_hypergraph(loaded.hypergraph)).hypergraph == loaded.hypergraph


def test_write_and_read_graph(tmp_path):
    g = gen_gnp(25, 0.4, seed=5)
    path = tmp_path / "g.edges"
    write_graph(g, path)
    assert path.read_text() == format_graph(g)
    assert read_input(path).graph == g
