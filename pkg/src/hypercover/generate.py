"""Synthetic edge lists for tests and benchmarks (thin wrapper over networkx)."""

from __future__ import annotations

import networkx as nx

KINDS = ("ba", "er", "path", "star")


def generate_edges(kind: str, n: int, m: int = 3, p: float = 0.05, seed: int = 42):
    """Undirected edge list of a synthetic graph on nodes ``0..n-1``."""
    if n < 1:
        raise ValueError("n must be positive")
    if kind == "ba":
        if not (1 <= m < n):
            raise ValueError(f"ba needs 1 <= m < n, got m={m}, n={n}")
        g = nx.barabasi_albert_graph(n, m, seed=seed)
    elif kind == "er":
        if not (0.0 <= p <= 1.0):
            raise ValueError(f"er needs p in [0, 1], got {p}")
        g = nx.gnp_random_graph(n, p, seed=seed)
    elif kind == "path":
        g = nx.path_graph(n)
    elif kind == "star":
        g = nx.star_graph(n - 1)
    else:
        raise ValueError(f"unknown graph kind {kind!r}; choose from {KINDS}")
    return sorted(tuple(sorted(e)) for e in g.edges())


def write_edges(edges, path) -> None:
    with open(path, "w") as fh:
        for u, v in edges:
            fh.write(f"{u} {v}\n")
