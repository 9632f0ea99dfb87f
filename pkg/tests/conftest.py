"""Shared strategies and helpers for the test suite."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from celink.graph import Graph, build_graph


@st.composite
def edge_lists(draw, min_nodes=2, max_nodes=25, min_edges=0):
    """Random (edges, n) pairs over dense node ids without self loops."""
    n = draw(st.integers(min_value=min_nodes, max_value=max_nodes))
    all_pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    max_edges = len(all_pairs)
    count = draw(st.integers(min_value=min(min_edges, max_edges), max_value=max_edges))
    idx = draw(
        st.lists(
            st.integers(min_value=0, max_value=max_edges - 1),
            min_size=count,
            max_size=count,
            unique=True,
        )
        if max_edges
        else st.just([])
    )
    return [all_pairs[i] for i in idx], n


@st.composite
def graphs(draw, min_nodes=2, max_nodes=25, min_edges=0):
    edges, n = draw(edge_lists(min_nodes, max_nodes, min_edges))
    return build_graph(edges, n)


def random_connected_graph(n: int, extra_edges: int, seed: int) -> Graph:
    """Random tree plus extra random edges; always connected."""
    rng = np.random.default_rng(seed)
    edges = set()
    for v in range(1, n):
        edges.add((int(rng.integers(0, v)), v))
    while len(edges) < min(n - 1 + extra_edges, n * (n - 1) // 2):
        u, v = rng.integers(0, n, size=2)
        if u == v:
            continue
        edges.add((min(int(u), int(v)), max(int(u), int(v))))
    return build_graph(sorted(edges), n)
