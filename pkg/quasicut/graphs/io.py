from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from quasicut.core.errors import QuasicutArtifactError, QuasicutValidationError
from quasicut.core.logging import get_logger
from quasicut.graphs.graph import Graph, UniformHypergraph

_logcore = get_logger(__name__)


@dataclass(frozen=True, kw_only=True)
class LoadedInput:
    """A parsed edge list; ``relabeling`` maps original vertex labels to dense indices when they had gaps."""

    graph: Graph | None = None
    hypergraph: UniformHypergraph | None = None
    relabeling: dict[int, int] | None = field(default=None)


def _dense_labels(n: int, edges: list[tuple[int, ...]]) -> tuple[list[tuple[int, ...]], dict[int, int] | None]:
    labels = sorted({v for edge in edges for v in edge})
    if not labels or (labels[0] >= 0 and labels[-1] < n):
        return edges, None

    if len(labels) > n:
        raise QuasicutValidationError(f"Edge list uses {len(labels)} distinct vertices but declares n={n}")

    mapping = {label: index for index, label in enumerate(labels)}
    _logcore.warning("Vertex labels are not in 0..{last}; relabelling {count} vertices", last=n - 1, count=len(labels))
    return [tuple(mapping[v] for v in edge) for edge in edges], mapping


def parse_edge_list(text: str) -> LoadedInput:
    lines = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not lines:
        raise QuasicutValidationError("Edge list is empty")

    try:
        header = [int(value) for value in lines[0]]
        edges = [tuple(int(value) for value in line) for line in lines[1:]]
    except ValueError as e:
        raise QuasicutValidationError(f"Edge list contains a non-integer token: {e}") from e

    if len(header) not in {2, 3}:
        raise QuasicutValidationError("Edge list header must be `n m` or `n m k`")

    n, m = header[0], header[1]
    k = header[2] if len(header) == 3 else 2
    if len(edges) != m:
        raise QuasicutValidationError(f"Edge list header declares {m} edges but {len(edges)} follow")

    if any(len(edge) != k for edge in edges):
        raise QuasicutValidationError(f"Every edge must list exactly {k} vertices")

    edges, mapping = _dense_labels(n, edges)

    if len(header) == 2:
        if len({tuple(sorted(edge)) for edge in edges}) != len(edges):
            raise QuasicutValidationError("Edge list contains duplicate edges")

        return LoadedInput(graph=Graph.from_edges(n, [(edge[0], edge[1]) for edge in edges]), relabeling=mapping)

    return LoadedInput(hypergraph=UniformHypergraph.from_edges(n, k, edges), relabeling=mapping)


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def format_hypergraph(h: UniformHypergraph) -> str:
    lines = [f"{h.n} {h.m} {h.k}"]
    lines.extend(" ".join(str(v) for v in edge) for edge in h.sorted_edges())
    return "\n".join(lines) + "\n"


def read_input(path: str | Path) -> LoadedInput:
    source = Path(path)
    if not source.is_file():
        raise QuasicutArtifactError(f"Input file `{source}` does not exist")

    return parse_edge_list(source.read_text(encoding="utf-8"))


def write_graph(g: Graph, path: str | Path) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(format_graph(g), encoding="utf-8")
