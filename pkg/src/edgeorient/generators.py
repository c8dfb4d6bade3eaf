"""Small graph-family constructors used by experiments and tests."""

from __future__ import annotations

import numpy as np

from .graph import Graph, build_graph


def complete_graph(n: int) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return build_graph(edges, n)


def path_graph(n: int) -> Graph:
    return build_graph([(i, i + 1) for i in range(n - 1)], n)


def cycle_graph(n: int) -> Graph:
    return build_graph([(i, (i + 1) % n) for i in range(n)], n)


def star_graph(leaves: int) -> Graph:
    """Center is vertex 0."""
    return build_graph([(0, i) for i in range(1, leaves + 1)], leaves + 1)


def barbell_graph(k: int) -> Graph:
    """Two complete graphs on k vertices joined by a single bridge edge."""
    edges = [(u, v) for u in range(k) for v in range(u + 1, k)]
    edges += [(k + u, k + v) for u in range(k) for v in range(u + 1, k)]
    edges.append((0, k))
    return build_graph(edges, 2 * k)


def grid_graph(rows: int, cols: int) -> Graph:
    def vid(r: int, c: int) -> int:
        return r * cols + c

    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((vid(r, c), vid(r, c + 1)))
            if r + 1 < rows:
                edges.append((vid(r, c), vid(r + 1, c)))
    return build_graph(edges, rows * cols)


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p) with a seeded generator; may be disconnected for small p."""
    rng = np.random.default_rng(seed)
    edges = [
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if rng.random() < p
    ]
    return build_graph(edges, n)


def random_connected_graph(n: int, extra_edges: int, seed: int) -> Graph:
    """Random spanning tree plus ``extra_edges`` uniform chords (duplicates
    allowed, so the result may be a multigraph)."""
    rng = np.random.default_rng(seed)
    edges: list[tuple[int, int]] = []
    for v in range(1, n):
        edges.append((int(rng.integers(0, v)), v))
    for _ in range(extra_edges):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n - 1))
        if v >= u:
            v += 1
        edges.append((u, v))
    return build_graph(edges, n)


def random_multigraph(n: int, m: int, seed: int) -> Graph:
    """Uniform endpoint pairs with replacement; parallel edges likely."""
    rng = np.random.default_rng(seed)
    edges: list[tuple[int, int]] = []
    for _ in range(m):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n - 1))
        if v >= u:
            v += 1
        edges.append((u, v))
    return build_graph(edges, n)
