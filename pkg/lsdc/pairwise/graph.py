"""Graph views of adjacency matrices."""

from __future__ import annotations

from pathlib import Path

import networkx as nx
import numpy as np

from lsdc.pairwise._base_similarity import AdjacencyMatrix


def to_graph(adjacency: AdjacencyMatrix) -> nx.Graph:
    """Return the undirected graph of the off-diagonal edges.

    Every sample is a node, including isolated ones.
    """
    a = adjacency.a.copy()
    np.fill_diagonal(a, False)
    return nx.from_numpy_array(a.astype(np.int8))


def edge_count(adjacency: AdjacencyMatrix) -> int:
    """Return the number of undirected off-diagonal edges."""
    return to_graph(adjacency).number_of_edges()


def write_edge_list(path: str | Path, adjacency: AdjacencyMatrix) -> int:
    """Write one "i j" line per undirected edge with i < j and return the count."""
    graph = to_graph(adjacency)
    edges = sorted((min(u, v), max(u, v)) for u, v in graph.edges())
    ordered = nx.Graph()
    ordered.add_nodes_from(sorted({node for edge in edges for node in edge}))
    ordered.add_edges_from(edges)
    nx.write_edgelist(ordered, Path(path), data=False)
    return len(edges)
