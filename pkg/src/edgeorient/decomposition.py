"""Edge-disjoint decomposition into weakly-regular expander subgraphs.

Pipeline: peel a graph into 2-uniformly-dense components over a halving
degree-threshold sweep, recursively split each component along sparse cuts
(adding self-loops at the cut endpoints so every vertex keeps its degree),
and repeat on the crossing edges until none remain.  Every emitted part
carries a certificate saying how its expansion was established.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .graph import (
    EXACT_LIMIT,
    Cut,
    Graph,
    conductance_exact,
    cut_stats,
    densest_subgraph,
    is_uniformly_dense,
    is_weakly_regular,
    sweep_cut_detail,
)


class InvariantViolation(RuntimeError):
    """A runtime-checked structural guarantee of the decomposition failed."""


def default_alpha(n: int) -> float:
    """Conductance target that keeps each round's crossing edges at most half
    of the round's edges, so the outer recursion halts in ~log2(m) rounds."""
    return 1.0 / (4 * max(1, math.ceil(math.log2(max(n, 2)))))


# ---------------------------------------------------------------------------
# Peeling into 2-uniformly-dense components


@dataclass(frozen=True)
class PeeledComponent:
    """One non-trivial connected component kept by the peeling sweep."""

    vertices: tuple[int, ...]  # local index -> parent vertex id
    graph: Graph
    edge_indices: tuple[int, ...]  # local edge index -> parent edge index
    threshold: int  # degree threshold at which the component was emitted


def peel_thresholds(n: int) -> list[int]:
    """Halving sweep n//2, n//4, ..., 1 (the floor of 1 guarantees that every
    edge eventually lands in some emitted component)."""
    out = []
    d = n // 2
    while d >= 1:
        out.append(d)
        d //= 2
    return out


def peel_uniformly_dense(g: Graph) -> list[PeeledComponent]:
    """Partition the edges of ``g`` into 2-uniformly-dense components.

    For each degree threshold, vertices of residual degree below the
    threshold are repeatedly stripped (lowest index first); the surviving
    non-trivial connected components are emitted and their edges retired.
    Stripped edges return in the next threshold's residual.
    """
    if g.has_self_loops:
        raise ValueError("peeling expects a raw graph without self-loops")
    n, m = g.n, g.m
    assigned = [False] * m
    parts: list[PeeledComponent] = []
    for dbar in peel_thresholds(n):
        residual = [i for i in range(m) if not assigned[i]]
        if not residual:
            break
        alive = [False] * m
        deg = [0] * n
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for i in residual:
            u, v = g.edges[i]
            alive[i] = True
            deg[u] += 1
            deg[v] += 1
            adj[u].append((v, i))
            adj[v].append((u, i))
        # strip low-degree vertices, re-scanning from vertex 0 each time
        while True:
            victim = -1
            for v in range(n):
                if 0 < deg[v] < dbar:
                    victim = v
                    break
            if victim < 0:
                break
            for nbr, ei in adj[victim]:
                if alive[ei]:
                    alive[ei] = False
                    deg[victim] -= 1
                    deg[nbr] -= 1
        # connected components over the surviving edges
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in residual:
            if alive[i]:
                u, v = g.edges[i]
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[ru] = rv
        groups: dict[int, list[int]] = {}
        for i in residual:
            if alive[i]:
                groups.setdefault(find(g.edges[i][0]), []).append(i)
        for root in sorted(groups, key=lambda r: min(groups[r])):
            eidx = sorted(groups[root])
            verts = sorted({w for i in eidx for w in g.edges[i]})
            local = {w: j for j, w in enumerate(verts)}
            comp = Graph(
                n=len(verts),
                edges=tuple((local[g.edges[i][0]], local[g.edges[i][1]]) for i in eidx),
            )
            parts.append(
                PeeledComponent(tuple(verts), comp, tuple(eidx), dbar)
            )
            for i in eidx:
                assigned[i] = True
    return parts


def check_no_dense_subgraph(
    g: Graph, threshold: float, exact_limit: int = EXACT_LIMIT
) -> bool:
    """True iff no induced subgraph has average degree above ``threshold``.

    Exact by enumeration up to ``exact_limit`` vertices; above that the
    greedy-peeling 2-approximation is consulted (one-sided: a dense subgraph
    the peeling misses goes undetected).
    """
    return densest_subgraph(g, exact_limit=exact_limit).avg_degree <= threshold


# ---------------------------------------------------------------------------
# Sparse-cut recursion


@dataclass(frozen=True)
class SparseCutResult:
    cut: Optional[Cut]
    method: str  # "exact" | "sweep-certified"
    converged: bool


def find_sparse_cut_detail(
    g: Graph, alpha: float, exact_limit: int = EXACT_LIMIT
) -> SparseCutResult:
    """Cut of conductance < alpha if the chosen oracle finds one.

    Exact enumeration up to ``exact_limit`` vertices; the spectral sweep
    above, augmented with all singleton cuts (checking singletons exactly is
    cheap and makes the weak-regularity certificate of emitted parts
    unconditional).
    """
    if g.n < 2:
        return SparseCutResult(None, "exact", True)
    if not g.is_connected:
        comp = cut_stats(g, g.components[0])
        method = "exact" if g.n <= exact_limit else "sweep-certified"
        return SparseCutResult(comp, method, True)
    if g.n <= exact_limit:
        value, cut = conductance_exact(g, exact_limit=exact_limit)
        if value < alpha:
            return SparseCutResult(cut, "exact", True)
        return SparseCutResult(None, "exact", True)
    res = sweep_cut_detail(g)
    best = res.cut
    deg = g.degrees
    loops = g.self_loops
    total = g.total_volume
    for v in range(g.n):
        crossing = deg[v] - loops[v]
        cond = 0.0 if crossing == 0 else crossing / min(deg[v], total - deg[v])
        if cond < best.conductance:
            best = cut_stats(g, (v,))
    if best.conductance < alpha:
        return SparseCutResult(best, "sweep-certified", res.converged)
    return SparseCutResult(None, "sweep-certified", res.converged)


def find_sparse_cut(
    g: Graph, alpha: float, exact_limit: int = EXACT_LIMIT
) -> Optional[Cut]:
    return find_sparse_cut_detail(g, alpha, exact_limit=exact_limit).cut


@dataclass(frozen=True)
class SubgraphCertificate:
    """What the decomposition promises about one emitted part."""

    alpha_claimed: float
    gamma_claimed: float
    method: str  # "exact" | "sweep-certified"
    uniform_density_alpha: float
    solver_converged: bool = True


@dataclass(frozen=True)
class ExpanderPart:
    """One certified expander produced from a uniformly-dense component."""

    vertices: tuple[int, ...]  # local index -> component vertex id
    graph: Graph  # includes accumulated self-loops
    edge_indices: tuple[int, ...]  # local edge index -> component edge index
    certificate: SubgraphCertificate


@dataclass(frozen=True)
class _WorkItem:
    vertices: tuple[int, ...]  # ids in the component graph
    edge_indices: tuple[int, ...]  # indices into the component edge list
    loops: tuple[int, ...]  # aligned with ``vertices``


def _item_graph(h: Graph, item: _WorkItem) -> Graph:
    local = {w: j for j, w in enumerate(item.vertices)}
    return Graph(
        n=len(item.vertices),
        edges=tuple(
            (local[h.edges[i][0]], local[h.edges[i][1]]) for i in item.edge_indices
        ),
        self_loops=item.loops,
    )


def decompose_expanders(
    h: Graph, alpha: float, exact_limit: int = EXACT_LIMIT
) -> tuple[list[ExpanderPart], list[int]]:
    """Split a 2-uniformly-dense graph into vertex-disjoint certified
    expanders, returning the crossing edges (as indices into ``h.edges``).

    Whenever a sparse cut is found, each endpoint of a crossing edge gains a
    self-loop on its own side, so degrees (loops included) are preserved all
    the way down; this is what makes every emitted part alpha/4-weakly-regular.
    """
    if not (0.0 < alpha <= 1.0):
        raise ValueError("alpha must lie in (0, 1]")
    if not is_uniformly_dense(h, 2.0, exact_limit=exact_limit):
        raise ValueError(
            "input is not 2-uniformly-dense; run the peeling stage first"
        )
    queue: deque[_WorkItem] = deque()
    queue.append(
        _WorkItem(tuple(range(h.n)), tuple(range(h.m)), tuple(h.self_loops))
    )
    parts: list[ExpanderPart] = []
    crossing_out: list[int] = []
    while queue:
        item = queue.popleft()
        sub = _item_graph(h, item)
        res = find_sparse_cut_detail(sub, alpha, exact_limit=exact_limit)
        if res.cut is None:
            cert = SubgraphCertificate(
                alpha_claimed=alpha,
                gamma_claimed=alpha / 4.0,
                method=res.method,
                uniform_density_alpha=2.0,
                solver_converged=res.converged,
            )
            if not is_weakly_regular(sub, min(1.0, alpha / 4.0)):
                raise InvariantViolation(
                    "emitted part is not alpha/4-weakly-regular"
                )
            parts.append(
                ExpanderPart(item.vertices, sub, item.edge_indices, cert)
            )
            continue
        in_side = [False] * sub.n
        for v in res.cut.side_s:
            in_side[v] = True
        side_sets: tuple[list[int], list[int]] = ([], [])
        for j in range(sub.n):
            side_sets[0 if in_side[j] else 1].append(j)
        new_edges: tuple[list[int], list[int]] = ([], [])
        extra_loops = [0] * sub.n
        local_edges = sub.edges
        for pos, ei in enumerate(item.edge_indices):
            u, v = local_edges[pos]
            if in_side[u] == in_side[v]:
                new_edges[0 if in_side[u] else 1].append(ei)
            else:
                crossing_out.append(ei)
                extra_loops[u] += 1
                extra_loops[v] += 1
        old_deg = sub.degrees
        local_of = {w: j for j, w in enumerate(item.vertices)}
        for side_verts, side_edges in zip(side_sets, new_edges):
            child = _WorkItem(
                vertices=tuple(item.vertices[j] for j in side_verts),
                edge_indices=tuple(side_edges),
                loops=tuple(item.loops[j] + extra_loops[j] for j in side_verts),
            )
            # degree preservation across the split, loops included
            child_deg = {w: lo for w, lo in zip(child.vertices, child.loops)}
            for ei in child.edge_indices:
                for w in h.edges[ei]:
                    child_deg[w] += 1
            for w, d in child_deg.items():
                if d != old_deg[local_of[w]]:
                    raise InvariantViolation(
                        f"degree of vertex {w} changed across a split"
                    )
            queue.append(child)
    if h.n >= 2 and h.m:
        bound = 2.0 * alpha * math.log2(h.n) * h.m
        if len(crossing_out) > bound + 1e-9:
            raise InvariantViolation(
                f"crossing edges {len(crossing_out)} exceed bound {bound:.3f}"
            )
    crossing_out.sort()
    return parts, crossing_out


# ---------------------------------------------------------------------------
# Full pipeline


@dataclass(frozen=True)
class DecompositionPart:
    vertices: tuple[int, ...]  # local index -> original vertex id
    graph: Graph  # local indices, with self-loops
    edge_indices: tuple[int, ...]  # local edge index -> original edge index
    certificate: SubgraphCertificate
    round_index: int


@dataclass(frozen=True)
class RoundStats:
    n_support: int  # vertices touched by this round's residual edges
    m_round: int  # residual edges entering the round
    crossing: int  # edges deferred to the next round


@dataclass(frozen=True)
class Decomposition:
    """Edge-disjoint cover of a graph by certified expander parts."""

    n: int
    m: int
    alpha: float
    parts: tuple[DecompositionPart, ...]
    rounds: int
    round_stats: tuple[RoundStats, ...]

    @cached_property
    def routing(self) -> tuple[tuple[int, int], ...]:
        """Original edge index -> (part index, edge index within the part)."""
        table: list[Optional[tuple[int, int]]] = [None] * self.m
        for pi, part in enumerate(self.parts):
            for local_ei, ei in enumerate(part.edge_indices):
                if table[ei] is not None:
                    raise InvariantViolation(f"edge {ei} appears in two parts")
                table[ei] = (pi, local_ei)
        if any(entry is None for entry in table):
            raise InvariantViolation("some edges are not covered by any part")
        return tuple(table)  # type: ignore[arg-type]

    @property
    def router(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.routing)

    @cached_property
    def membership(self) -> tuple[int, ...]:
        counts = [0] * self.n
        for part in self.parts:
            for v in part.vertices:
                counts[v] += 1
        return tuple(counts)


def full_decomposition(
    g: Graph, alpha: Optional[float] = None, exact_limit: int = EXACT_LIMIT
) -> Decomposition:
    """Alternate peeling and expander splitting until every edge is routed."""
    if g.has_self_loops:
        raise ValueError("decomposition expects a simple-loop-free input")
    if alpha is None:
        alpha = default_alpha(g.n)
    m = g.m
    parts: list[DecompositionPart] = []
    stats: list[RoundStats] = []
    residual = list(range(m))
    routed = [False] * m
    rounds = 0
    max_rounds = (math.ceil(math.log2(m)) + 1) if m >= 1 else 0
    while residual:
        rounds += 1
        if rounds > max_rounds:
            raise InvariantViolation(
                f"round {rounds} exceeds cap {max_rounds}: crossing edges are "
                f"not halving (alpha={alpha} too large?)"
            )
        support = sorted({w for i in residual for w in g.edges[i]})
        s_local = {w: j for j, w in enumerate(support)}
        rgraph = Graph(
            n=len(support),
            edges=tuple(
                (s_local[g.edges[i][0]], s_local[g.edges[i][1]]) for i in residual
            ),
        )
        round_m = len(residual)
        next_residual: list[int] = []
        for comp in peel_uniformly_dense(rgraph):
            eparts, crossing = decompose_expanders(
                comp.graph, alpha, exact_limit=exact_limit
            )
            for ep in eparts:
                parent_vertices = tuple(
                    support[comp.vertices[v]] for v in ep.vertices
                )
                parent_edges = tuple(
                    residual[comp.edge_indices[i]] for i in ep.edge_indices
                )
                parts.append(
                    DecompositionPart(
                        vertices=parent_vertices,
                        graph=ep.graph,
                        edge_indices=parent_edges,
                        certificate=ep.certificate,
                        round_index=rounds,
                    )
                )
                for ei in parent_edges:
                    if routed[ei]:
                        raise InvariantViolation(f"edge {ei} routed twice")
                    routed[ei] = True
            next_residual.extend(
                residual[comp.edge_indices[ci]] for ci in crossing
            )
        if len(support) >= 2:
            bound = 2.0 * alpha * math.log2(len(support)) * round_m
            if len(next_residual) > bound + 1e-9:
                raise InvariantViolation(
                    f"round {rounds} crossing {len(next_residual)} exceeds "
                    f"bound {bound:.3f}"
                )
        stats.append(RoundStats(len(support), round_m, len(next_residual)))
        next_residual.sort()
        residual = next_residual
    if not all(routed):
        missing = [i for i, r in enumerate(routed) if not r]
        raise InvariantViolation(f"edges never routed: {missing[:10]}")
    return Decomposition(
        n=g.n,
        m=m,
        alpha=alpha,
        parts=tuple(parts),
        rounds=rounds,
        round_stats=tuple(stats),
    )


# ---------------------------------------------------------------------------
# JSON report round trip


def decomposition_to_json(dec: Decomposition) -> dict:
    hist: dict[int, int] = {}
    for c in dec.membership:
        hist[c] = hist.get(c, 0) + 1
    return {
        "n": dec.n,
        "m": dec.m,
        "alpha": dec.alpha,
        "rounds": dec.rounds,
        "round_stats": [
            {"n_support": r.n_support, "m_round": r.m_round, "crossing": r.crossing}
            for r in dec.round_stats
        ],
        "membership_histogram": {str(k): hist[k] for k in sorted(hist)},
        "parts": [
            {
                "vertices": list(p.vertices),
                "edges": list(p.edge_indices),
                "self_loops": list(p.graph.self_loops),
                "round": p.round_index,
                "certificate": {
                    "alpha_claimed": p.certificate.alpha_claimed,
                    "gamma_claimed": p.certificate.gamma_claimed,
                    "method": p.certificate.method,
                    "uniform_density_alpha": p.certificate.uniform_density_alpha,
                    "solver_converged": p.certificate.solver_converged,
                },
            }
            for p in dec.parts
        ],
    }


def decomposition_from_json(data: dict, g: Graph) -> Decomposition:
    """Rebuild a decomposition against its original graph, validating that
    the stored parts still form an edge-disjoint exhaustive cover."""
    if data["n"] != g.n or data["m"] != g.m:
        raise ValueError("decomposition does not match the supplied graph")
    parts: list[DecompositionPart] = []
    seen = [False] * g.m
    for pdata in data["parts"]:
        vertices = tuple(int(v) for v in pdata["vertices"])
        local = {w: j for j, w in enumerate(vertices)}
        edge_indices = tuple(int(e) for e in pdata["edges"])
        for ei in edge_indices:
            if ei < 0 or ei >= g.m or seen[ei]:
                raise InvariantViolation(
                    f"stored decomposition routes edge {ei} badly"
                )
            seen[ei] = True
            u, v = g.edges[ei]
            if u not in local or v not in local:
                raise InvariantViolation(
                    f"edge {ei} endpoints escape its part's vertex set"
                )
        cert = SubgraphCertificate(
            alpha_claimed=float(pdata["certificate"]["alpha_claimed"]),
            gamma_claimed=float(pdata["certificate"]["gamma_claimed"]),
            method=str(pdata["certificate"]["method"]),
            uniform_density_alpha=float(
                pdata["certificate"]["uniform_density_alpha"]
            ),
            solver_converged=bool(pdata["certificate"]["solver_converged"]),
        )
        graph = Graph(
            n=len(vertices),
            edges=tuple(
                (local[g.edges[ei][0]], local[g.edges[ei][1]])
                for ei in edge_indices
            ),
            self_loops=tuple(int(c) for c in pdata["self_loops"]),
        )
        parts.append(
            DecompositionPart(
                vertices=vertices,
                graph=graph,
                edge_indices=edge_indices,
                certificate=cert,
                round_index=int(pdata["round"]),
            )
        )
    if not all(seen):
        raise InvariantViolation("stored decomposition does not cover all edges")
    return Decomposition(
        n=g.n,
        m=g.m,
        alpha=float(data["alpha"]),
        parts=tuple(parts),
        rounds=int(data["rounds"]),
        round_stats=tuple(
            RoundStats(int(r["n_support"]), int(r["m_round"]), int(r["crossing"]))
            for r in data.get("round_stats", [])
        ),
    )


def load_decomposition(path, g: Graph) -> Decomposition:
    with open(path, "r", encoding="utf-8") as fh:
        return decomposition_from_json(json.load(fh), g)
