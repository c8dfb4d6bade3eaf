"""Undirected multigraph core: volumes, cuts, conductance and density predicates.

The graph type here is the universe for everything else in the package:
cut statistics feed the decomposition, degrees feed the arrival streams,
and the exact/spectral conductance oracles certify expander parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

#: Largest vertex count for which brute-force enumeration (all cuts, all
#: induced subgraphs) is used; above it the spectral sweep and greedy
#: peeling approximations take over.
EXACT_LIMIT = 20

_POWER_TOL = 1e-9
_SWEEP_RESTARTS = 8


@dataclass(frozen=True)
class Graph:
    """Immutable undirected multigraph on vertices ``0..n-1``.

    ``edges`` keeps its defining order and may contain duplicates (parallel
    edges).  ``self_loops[v]`` counts loops at ``v``; each loop contributes
    exactly 1 to ``degree(v)`` and to the volume of whichever side of a cut
    contains ``v``, and never crosses a cut.  Loops appear only through the
    decomposition's bookkeeping; plain input graphs have none.
    """

    n: int
    edges: tuple[tuple[int, int], ...] = ()
    self_loops: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        if not self.self_loops:
            object.__setattr__(self, "self_loops", (0,) * self.n)
        if len(self.self_loops) != self.n:
            raise ValueError("self_loops must have one entry per vertex")
        if any(c < 0 for c in self.self_loops):
            raise ValueError("self-loop counts must be non-negative")
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            if u == v:
                raise ValueError(
                    f"edge ({u}, {v}) is a self-loop; loops go in self_loops"
                )

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        for v, c in enumerate(self.self_loops):
            deg[v] += c
        return tuple(deg)

    def degree(self, v: int) -> int:
        return self.degrees[v]

    @cached_property
    def total_volume(self) -> int:
        return 2 * self.m + sum(self.self_loops)

    def volume(self, vertices: Iterable[int]) -> int:
        deg = self.degrees
        return sum(deg[v] for v in vertices)

    @property
    def has_self_loops(self) -> bool:
        return any(self.self_loops)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per-vertex list of ``(neighbor, edge_index)``; loops excluded."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for i, (u, v) in enumerate(self.edges):
            adj[u].append((v, i))
            adj[v].append((u, i))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        """Connected components (isolated vertices are singletons)."""
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        groups: dict[int, list[int]] = {}
        for v in range(self.n):
            groups.setdefault(find(v), []).append(v)
        return tuple(tuple(g) for g in sorted(groups.values()))

    @property
    def is_connected(self) -> bool:
        return len(self.components) <= 1

    @cached_property
    def _edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if self.m == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        arr = np.asarray(self.edges, dtype=np.int64)
        return arr[:, 0], arr[:, 1]


@dataclass(frozen=True)
class Cut:
    """A proper vertex cut with its crossing count, volumes and conductance.

    ``conductance == crossing / min(vol_s, vol_rest)``, with the convention
    that a cut with no crossing edges has conductance 0 (covers disconnected
    graphs, where either side may carry zero volume).
    """

    side_s: tuple[int, ...]
    crossing: int
    vol_s: int
    vol_rest: int
    conductance: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.conductance):
            raise ValueError("conductance must be non-negative")


def build_graph(edge_list: Sequence[tuple[int, int]], n: int) -> Graph:
    """Build a graph from an edge list, rejecting loops and bad indices."""
    return Graph(n=n, edges=tuple((int(u), int(v)) for u, v in edge_list))


def cut_stats(g: Graph, s: Iterable[int]) -> Cut:
    """Exact crossing count, volumes and conductance of the cut ``(s, V\\s)``."""
    side = sorted(set(int(v) for v in s))
    if not side:
        raise ValueError("cut side must be non-empty")
    if any(v < 0 or v >= g.n for v in side):
        raise ValueError("cut side contains out-of-range vertices")
    if len(side) == g.n:
        raise ValueError("cut side must be a proper subset")
    in_s = bytearray(g.n)
    for v in side:
        in_s[v] = 1
    crossing = sum(1 for u, v in g.edges if in_s[u] != in_s[v])
    vol_s = g.volume(side)
    vol_rest = g.total_volume - vol_s
    cond = 0.0 if crossing == 0 else crossing / min(vol_s, vol_rest)
    return Cut(tuple(side), crossing, vol_s, vol_rest, cond)


def _subset_bits(n: int, masks: np.ndarray) -> np.ndarray:
    """Boolean matrix ``bits[v, i]`` = vertex v belongs to subset masks[i]."""
    return np.stack([((masks >> v) & 1).astype(bool) for v in range(n)])


def conductance_exact(
    g: Graph, exact_limit: int = EXACT_LIMIT
) -> tuple[float, Cut]:
    """Minimum conductance over all proper cuts, with a minimizing cut.

    Enumerates the ``2^(n-1) - 1`` cuts whose side excludes vertex ``n-1``;
    each unordered cut is visited exactly once.  Disconnected graphs return
    conductance 0 witnessed by one connected component.
    """
    if g.n < 2:
        raise ValueError("conductance requires at least two vertices")
    if g.n > exact_limit:
        raise ValueError(
            f"n={g.n} exceeds exact_limit={exact_limit}; use sweep_cut"
        )
    if not g.is_connected:
        witness = cut_stats(g, g.components[0])
        return 0.0, witness

    masks = np.arange(1, 1 << (g.n - 1), dtype=np.int64)
    bits = _subset_bits(g.n - 1, masks)
    crossing = np.zeros(masks.shape[0], dtype=np.int64)
    u_arr, v_arr = g._edge_arrays
    last = g.n - 1
    for u, v in zip(u_arr, v_arr):
        bu = bits[u] if u != last else np.zeros_like(crossing, dtype=bool)
        bv = bits[v] if v != last else np.zeros_like(crossing, dtype=bool)
        crossing += bu ^ bv
    deg = np.asarray(g.degrees, dtype=np.int64)
    vol_s = np.zeros(masks.shape[0], dtype=np.int64)
    for v in range(g.n - 1):
        vol_s += deg[v] * bits[v]
    vol_rest = g.total_volume - vol_s
    min_vol = np.minimum(vol_s, vol_rest)
    cond = crossing / min_vol  # connected => crossing >= 1 => min_vol >= 1
    best = int(np.argmin(cond))
    side = tuple(v for v in range(g.n - 1) if bits[v, best])
    return float(cond[best]), cut_stats(g, side)


def _lazy_walk_matvec(g: Graph) -> tuple[np.ndarray, "np.ndarray", object]:
    """Return (sqrt degrees, top eigenvector, operator) of the lazy walk.

    The operator is ``x -> (x + D^{-1/2} A D^{-1/2} x) / 2`` whose spectrum
    lives in [0, 1]; its top eigenvector is ``sqrt(deg)`` and the next one
    down corresponds to the second-smallest eigenvalue of the
    degree-normalized Laplacian.
    """
    deg = np.asarray(g.degrees, dtype=np.float64)
    sq = np.sqrt(deg)
    phi = sq / np.linalg.norm(sq)
    u_arr, v_arr = g._edge_arrays
    loops = np.asarray(g.self_loops, dtype=np.float64)
    n = g.n

    def op(x: np.ndarray) -> np.ndarray:
        z = x / sq
        ax = (
            np.bincount(u_arr, weights=z[v_arr], minlength=n)
            + np.bincount(v_arr, weights=z[u_arr], minlength=n)
            + loops * z
        )
        return 0.5 * (x + ax / sq)

    return sq, phi, op


def _second_eigenvector(g: Graph, seed: int = 0) -> tuple[np.ndarray, bool]:
    """Deflated power iteration for the Fiedler-like sweep ordering vector.

    Returns the random-walk-scaled eigenvector (entries ``y_v / sqrt(deg_v)``)
    and whether the Rayleigh quotient converged to relative tolerance 1e-9
    within the iteration cap ``10 * n * log2(n)``.
    """
    n = g.n
    sq, phi, op = _lazy_walk_matvec(g)
    rng = np.random.default_rng(0x5EED + seed)
    x = rng.standard_normal(n)
    x -= (phi @ x) * phi
    nx = np.linalg.norm(x)
    if nx == 0.0:  # pathological start; any deflated unit vector will do
        x = np.zeros(n)
        x[0] = 1.0
        x -= (phi @ x) * phi
        nx = np.linalg.norm(x)
    x /= nx
    cap = int(10 * n * max(1.0, math.log2(max(n, 2))))
    prev = None
    converged = False
    for _ in range(cap):
        y = op(x)
        y -= (phi @ y) * phi
        ny = np.linalg.norm(y)
        if ny == 0.0:
            break
        y /= ny
        rq = float(y @ op(y))
        x = y
        if prev is not None and abs(rq - prev) <= _POWER_TOL * max(abs(rq), 1.0):
            converged = True
            break
        prev = rq
    return x / sq, converged


def _best_prefix_cut(g: Graph, order: Sequence[int]) -> Cut:
    """Best of the ``n-1`` prefix cuts of a vertex ordering."""
    deg = g.degrees
    adj = g.adjacency
    in_s = bytearray(g.n)
    total = g.total_volume
    vol_s = 0
    crossing = 0
    best_cond = math.inf
    best_i = 0
    for i, v in enumerate(order[:-1]):
        for nbr, _ in adj[v]:
            crossing += -1 if in_s[nbr] else 1
        in_s[v] = 1
        vol_s += deg[v]
        cond = 0.0 if crossing == 0 else crossing / min(vol_s, total - vol_s)
        if cond < best_cond:
            best_cond = cond
            best_i = i
    return cut_stats(g, order[: best_i + 1])


@dataclass(frozen=True)
class SweepResult:
    """Outcome of a spectral sweep: best prefix cut plus solver diagnostics."""

    cut: Cut
    converged: bool


def sweep_cut_detail(g: Graph, seed: int = 0) -> SweepResult:
    """Spectral sweep with restart fallback; always returns the best cut found.

    On eigensolver non-convergence the best cut across 8 random-seeded
    restarts is kept and the result is flagged unconverged.
    """
    if g.n < 2:
        raise ValueError("sweep_cut requires at least two vertices")
    if not g.is_connected:
        raise ValueError("sweep_cut requires a connected graph")
    vec, converged = _second_eigenvector(g, seed=seed)
    order = list(np.lexsort((np.arange(g.n), vec)))
    best = _best_prefix_cut(g, order)
    if not converged:
        for k in range(_SWEEP_RESTARTS):
            vec_k, conv_k = _second_eigenvector(g, seed=seed + 1 + k)
            order_k = list(np.lexsort((np.arange(g.n), vec_k)))
            cand = _best_prefix_cut(g, order_k)
            if cand.conductance < best.conductance:
                best = cand
            converged = converged or conv_k
    return SweepResult(cut=best, converged=converged)


def sweep_cut(g: Graph, alpha: float) -> Optional[Cut]:
    """Best spectral prefix cut if its conductance is below ``alpha``.

    Returning ``None`` certifies only that the sweep found no cut below the
    threshold; the graph is then *treated* as an alpha-expander.
    """
    result = sweep_cut_detail(g)
    if result.cut.conductance < alpha:
        return result.cut
    return None


def is_weakly_regular(g: Graph, gamma: float) -> bool:
    """Every degree is at least ``gamma`` times the average degree."""
    if not (0.0 <= gamma <= 1.0):
        raise ValueError("gamma must lie in [0, 1]")
    if g.n == 0:
        return True
    avg = g.total_volume / g.n
    return min(g.degrees) >= gamma * avg


@dataclass(frozen=True)
class DensestSubgraph:
    """Maximum induced average degree found, with the achieving subset.

    ``exact`` records whether the value came from full enumeration or the
    greedy min-degree peeling 2-approximation.
    """

    avg_degree: float
    vertices: tuple[int, ...]
    exact: bool


def _densest_exact(g: Graph) -> DensestSubgraph:
    masks = np.arange(1, 1 << g.n, dtype=np.int64)
    bits = _subset_bits(g.n, masks)
    inner = np.zeros(masks.shape[0], dtype=np.int64)
    u_arr, v_arr = g._edge_arrays
    for u, v in zip(u_arr, v_arr):
        inner += bits[u] & bits[v]
    size = np.zeros(masks.shape[0], dtype=np.int64)
    volume = 2 * inner
    for v in range(g.n):
        size += bits[v]
        if g.self_loops[v]:
            volume += g.self_loops[v] * bits[v]
    avg = volume / size
    best = int(np.argmax(avg))
    side = tuple(v for v in range(g.n) if bits[v, best])
    return DensestSubgraph(float(avg[best]), side, exact=True)


def _densest_greedy(g: Graph) -> DensestSubgraph:
    """Charikar peeling: repeatedly drop a min-degree vertex, track the best
    stage; the returned average degree is within a factor 2 of the optimum."""
    deg = list(g.degrees)
    alive = [True] * g.n
    adj = g.adjacency
    vol = g.total_volume
    k = g.n
    order: list[int] = []
    best_avg = 0.0
    best_stage = 0  # number of removals at the best stage
    while k > 0:
        avg = vol / k
        if avg > best_avg:
            best_avg = avg
            best_stage = len(order)
        v = min((x for x in range(g.n) if alive[x]), key=lambda x: (deg[x], x))
        alive[v] = False
        order.append(v)
        vol -= deg[v]
        for nbr, _ in adj[v]:
            if alive[nbr]:
                deg[nbr] -= 1
                vol -= 1
        k -= 1
    removed = set(order[:best_stage])
    side = tuple(v for v in range(g.n) if v not in removed)
    return DensestSubgraph(best_avg, side, exact=False)


def densest_subgraph(g: Graph, exact_limit: int = EXACT_LIMIT) -> DensestSubgraph:
    """Maximum over subsets of the induced average degree (loops count 1)."""
    if g.n == 0 or (g.m == 0 and not g.has_self_loops):
        return DensestSubgraph(0.0, (), exact=True)
    if g.n <= exact_limit:
        return _densest_exact(g)
    return _densest_greedy(g)


def is_uniformly_dense(
    g: Graph, alpha: float, exact_limit: int = EXACT_LIMIT
) -> bool:
    """Min degree at least ``avg/alpha`` and no induced subgraph denser than
    ``alpha * avg``.  Exact below ``exact_limit`` vertices, 2-approximate
    (one-sided: may miss a violation, never a false alarm) above it."""
    if alpha < 1.0:
        raise ValueError("alpha must be at least 1")
    if g.n == 0:
        return True
    avg = g.total_volume / g.n
    if min(g.degrees) * alpha < avg:
        return False
    dens = densest_subgraph(g, exact_limit=exact_limit)
    return dens.avg_degree <= alpha * avg


def read_edge_list(path: str | Path) -> Graph:
    """Parse the text edge-list format: one ``u v`` pair per line, 0-indexed,
    ``#`` comments ignored, optional leading header ``n <count>`` (otherwise
    ``n`` is inferred as one past the largest index)."""
    edges: list[tuple[int, int]] = []
    n: Optional[int] = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] == "n" and n is None and not edges:
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: malformed header")
                n = int(parts[1])
                continue
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v'")
            edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        n = 1 + max((max(u, v) for u, v in edges), default=-1)
    return build_graph(edges, n)


def write_edge_list(g: Graph, path: str | Path) -> None:
    if g.has_self_loops:
        raise ValueError("edge-list format cannot represent self-loops")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"n {g.n}\n")
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")
