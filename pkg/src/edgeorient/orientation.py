"""Online edge-signing engines and their bookkeeping.

All engines share one state shape: a per-vertex signed discrepancy
(in-degree minus out-degree), a step counter and a cached soft-max
potential.  Each processed arrival moves exactly one unit of discrepancy
from the tail to the head, so the vector always sums to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Protocol, Sequence

from .decomposition import Decomposition
from .graph import Graph

#: beyond this value of ``lambda * |disc|`` the potential switches to a
#: log-sum-exp evaluation (direct cosh overflows near 710).
OVERFLOW_ARG = 700.0


class CoinSource(Protocol):
    """What the engines need from a random source (``random.Random`` works)."""

    def getrandbits(self, k: int) -> int: ...

    def random(self) -> float: ...


class OrientedEdge(NamedTuple):
    tail: int
    head: int
    step: int


def _cosh(x: float) -> float:
    return math.cosh(x)


@dataclass
class OrientationState:
    """Mutable per-process state: discrepancies, step count, potential cache.

    The cache tracks ``sum_v cosh(lam * disc[v])`` incrementally while valid;
    ``refresh_potential`` recomputes it exactly (and is called at every
    recorded row, so accumulated float drift never reaches the outputs).
    """

    disc: list[int]
    lam: float
    step: int = 0
    _phi: float = field(default=0.0, repr=False)
    _phi_valid: bool = field(default=False, repr=False)

    @classmethod
    def fresh(cls, n: int, lam: float) -> "OrientationState":
        state = cls(disc=[0] * n, lam=lam)
        state._phi = float(n)
        state._phi_valid = True
        return state

    @property
    def n(self) -> int:
        return len(self.disc)

    def refresh_potential(self) -> float:
        self._phi = potential_of(self.disc, self.lam)
        self._phi_valid = True
        return self._phi

    def _apply(self, tail: int, head: int) -> None:
        d = self.disc
        lam = self.lam
        if self._phi_valid:
            dt, dh = d[tail], d[head]
            arg = lam * max(abs(dt) + 1, abs(dh) + 1)
            if arg > OVERFLOW_ARG:
                self._phi_valid = False
            else:
                self._phi += (
                    _cosh(lam * (dt - 1))
                    - _cosh(lam * dt)
                    + _cosh(lam * (dh + 1))
                    - _cosh(lam * dh)
                )
        d[tail] -= 1
        d[head] += 1
        self.step += 1


def potential_of(disc: Sequence[int], lam: float) -> float:
    """Exact ``sum cosh(lam * d)``, in log-sum-exp form past the overflow
    threshold (the two forms agree to 1e-9 relative at the crossover)."""
    peak = lam * max((abs(d) for d in disc), default=0)
    if peak <= OVERFLOW_ARG:
        return sum(_cosh(lam * d) for d in disc)
    return math.exp(log_potential_of(disc, lam))


def log_potential_of(disc: Sequence[int], lam: float) -> float:
    """``log(sum cosh(lam * d))``, always finite; used by guard checks."""
    args: list[float] = []
    for d in disc:
        args.append(lam * d)
        args.append(-lam * d)
    peak = max(args, default=0.0)
    total = sum(math.exp(a - peak) for a in args)
    return peak + math.log(total) - math.log(2.0)


def potential(state: OrientationState) -> float:
    """Current potential; serves the cache when valid."""
    if state._phi_valid:
        return state._phi
    return state.refresh_potential()


def potential_delta(state: OrientationState, tail: int, head: int) -> float:
    """Potential change a hypothetical ``tail -> head`` orientation would
    cause, without mutating the state."""
    d = state.disc
    lam = state.lam
    return (
        _cosh(lam * (d[tail] - 1))
        - _cosh(lam * d[tail])
        + _cosh(lam * (d[head] + 1))
        - _cosh(lam * d[head])
    )


def _check_edge(state: OrientationState, u: int, v: int) -> None:
    if u == v:
        raise ValueError("self-loop arrivals are not orientable")
    n = len(state.disc)
    if not (0 <= u < n and 0 <= v < n):
        raise ValueError(f"edge ({u}, {v}) out of range for n={n}")


def greedy_step(
    state: OrientationState, edge: tuple[int, int], rng: CoinSource
) -> OrientedEdge:
    """Orient from the endpoint of strictly larger discrepancy; ties take one
    coin bit (0 picks the first endpoint as tail)."""
    u, v = edge
    _check_edge(state, u, v)
    d = state.disc
    if d[u] > d[v]:
        tail, head = u, v
    elif d[v] > d[u]:
        tail, head = v, u
    elif rng.getrandbits(1) == 0:
        tail, head = u, v
    else:
        tail, head = v, u
    state._apply(tail, head)
    return OrientedEdge(tail, head, state.step)


def random_step(
    state: OrientationState, edge: tuple[int, int], rng: CoinSource
) -> OrientedEdge:
    """Orient by one fair coin bit, ignoring discrepancies."""
    u, v = edge
    _check_edge(state, u, v)
    if rng.getrandbits(1) == 0:
        tail, head = u, v
    else:
        tail, head = v, u
    state._apply(tail, head)
    return OrientedEdge(tail, head, state.step)


def one_plus_beta_step(
    state: OrientationState,
    pair: tuple[int, int],
    beta: float,
    rng: CoinSource,
) -> Optional[OrientedEdge]:
    """Mixed engine on product-distribution pairs: greedy with probability
    ``beta``, a uniform sign otherwise.  Identical endpoints are a no-op.

    At ``beta`` exactly 1 (or 0) no mixing coin is drawn, so a shared seed
    reproduces ``greedy_step`` (resp. ``random_step``) bit for bit.
    """
    if not (0.0 <= beta <= 1.0):
        raise ValueError("beta must lie in [0, 1]")
    u, v = pair
    if u == v:
        return None
    if beta >= 1.0:
        return greedy_step(state, pair, rng)
    if beta <= 0.0:
        return random_step(state, pair, rng)
    if rng.random() < beta:
        return greedy_step(state, pair, rng)
    return random_step(state, pair, rng)


def composed_step(
    states: Sequence[OrientationState],
    decomposition: Decomposition,
    edge_index: int,
    rng: CoinSource,
    step: Optional[int] = None,
) -> OrientedEdge:
    """Route an arrival to its owning part and orient it greedily there.

    Returns the oriented edge in the original graph's vertex ids; ``step``
    defaults to the owning part's local arrival count.
    """
    if not (0 <= edge_index < decomposition.m):
        raise ValueError(f"edge index {edge_index} is not routed")
    part_idx, local_ei = decomposition.routing[edge_index]
    part = decomposition.parts[part_idx]
    local_edge = part.graph.edges[local_ei]
    oriented = greedy_step(states[part_idx], local_edge, rng)
    return OrientedEdge(
        part.vertices[oriented.tail],
        part.vertices[oriented.head],
        oriented.step if step is None else step,
    )


def fresh_composed_states(
    decomposition: Decomposition, lam: float
) -> list[OrientationState]:
    return [
        OrientationState.fresh(len(p.vertices), lam) for p in decomposition.parts
    ]


# ---------------------------------------------------------------------------
# Offline oracle


def offline_orient(g: Graph) -> list[tuple[int, int]]:
    """Orientation of all edges with every vertex's |in - out| at most 1.

    Odd-degree vertices are paired up with virtual edges, each component of
    the augmented multigraph is toured along an Euler circuit, edges are
    oriented along the tour, and the virtual edges are dropped (each vertex
    loses at most one incident tour edge).

    Returns one ``(tail, head)`` per input edge, aligned with ``g.edges``.
    """
    if g.has_self_loops:
        raise ValueError("offline orientation expects a loop-free multigraph")
    n, m = g.n, g.m
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for i, (u, v) in enumerate(g.edges):
        adj[u].append((v, i))
        adj[v].append((u, i))
    odd = [v for v in range(n) if len(adj[v]) % 2 == 1]
    virtual_base = m
    for k in range(0, len(odd), 2):
        u, v = odd[k], odd[k + 1]
        idx = virtual_base + k // 2
        adj[u].append((v, idx))
        adj[v].append((u, idx))
    total_edges = m + len(odd) // 2
    used = [False] * total_edges
    cursor = [0] * n
    orientation: list[Optional[tuple[int, int]]] = [None] * m

    for start in range(n):
        if cursor[start] >= len(adj[start]):
            continue
        # Hierholzer walk; every excursion closes a circuit, so the walked
        # directions alone already balance in- against out-edges everywhere.
        stack = [start]
        while stack:
            x = stack[-1]
            advanced = False
            while cursor[x] < len(adj[x]):
                y, ei = adj[x][cursor[x]]
                cursor[x] += 1
                if used[ei]:
                    continue
                used[ei] = True
                stack.append(y)
                if ei < m:
                    orientation[ei] = (x, y)
                advanced = True
                break
            if not advanced:
                stack.pop()
    missing = [i for i, o in enumerate(orientation) if o is None]
    if missing:  # every real edge lies on some circuit
        raise AssertionError(f"edges left unoriented: {missing[:10]}")
    return orientation  # type: ignore[return-value]


def discrepancy_of(orientation: Sequence[tuple[int, int]], n: int) -> list[int]:
    """Discrepancy vector (in minus out) induced by a list of oriented edges."""
    disc = [0] * n
    for tail, head in orientation:
        disc[tail] -= 1
        disc[head] += 1
    return disc


# ---------------------------------------------------------------------------
# Majorization


def majorizes(a: Sequence[float], b: Sequence[float]) -> bool:
    """Prefix-sum dominance after sorting both vectors in descending order."""
    if len(a) != len(b):
        raise ValueError("majorization needs vectors of equal length")
    sa = sorted(a, reverse=True)
    sb = sorted(b, reverse=True)
    pa = 0.0
    pb = 0.0
    for xa, xb in zip(sa, sb):
        pa += xa
        pb += xb
        if pa < pb:
            return False
    return True
