from __future__ import annotations

from collections.abc import Iterator

import networkx as nx
import pytest

from quasicut.core.configuration import reset_toolkit_config
from quasicut.graphs.graph import Graph


@pytest.fixture(autouse=True)
def _fresh_toolkit_config() -> Iterator[None]:
    reset_toolkit_config()
    yield
    reset_toolkit_config()


def to_networkx(g: Graph) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(g.n))
    graph.add_edges_from(g.edges())
    return graph


def from_networkx(graph: nx.Graph) -> Graph:
    return Graph.from_edges(graph.number_of_nodes(), graph.edges())
