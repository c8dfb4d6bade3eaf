"""Seeded i.i.d. arrival streams: uniform graph edges and weighted vertex pairs.

A stream is a pure function of (kind, source, horizon, seed): re-iterating
replays the identical sequence, and a shorter horizon yields a prefix of a
longer one under the same seed.  Draws come from a PCG64 generator in
fixed-size chunks; weighted sampling uses binary search over a prefix-sum
table, with exact integer thresholds whenever the weights are integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from .graph import Graph

_CHUNK = 8192  # fixed so that chunking never changes the sampled sequence


def _sample_indices(
    gen: np.random.Generator, cum: np.ndarray, total, size: int
) -> np.ndarray:
    """Indices distributed proportionally to the weights behind ``cum``."""
    if np.issubdtype(cum.dtype, np.integer):
        draws = gen.integers(0, int(total), size=size)
    else:
        draws = gen.random(size=size) * total
    return np.searchsorted(cum, draws, side="right")


@dataclass(frozen=True)
class ArrivalStream:
    """Reproducible arrival sequence; iterate to consume.

    ``kind`` is ``"uniform-edge"`` (yields edges of ``graph``) or
    ``"product-pair"`` (yields vertex pairs, possibly equal, drawn i.i.d.
    proportionally to ``weights``).
    """

    kind: str
    horizon: int
    seed: int
    graph: Union[Graph, None] = None
    weights: Union[tuple, None] = None

    def __post_init__(self) -> None:
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")
        if self.kind == "uniform-edge":
            if self.graph is None or self.graph.m == 0:
                raise ValueError("uniform-edge stream needs a non-empty graph")
        elif self.kind == "product-pair":
            w = np.asarray(self.weights, dtype=np.float64)
            if w.size == 0 or np.any(w < 0) or w.sum() <= 0:
                raise ValueError(
                    "product-pair stream needs non-negative weights with "
                    "positive total"
                )
        else:
            raise ValueError(f"unknown stream kind: {self.kind}")

    def _generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.PCG64(self.seed))

    def iter_indices(self) -> Iterator[int]:
        """Edge indices of a uniform-edge stream (what the router consumes)."""
        if self.kind != "uniform-edge":
            raise ValueError("only uniform-edge streams have edge indices")
        gen = self._generator()
        m = self.graph.m
        remaining = self.horizon
        while remaining > 0:
            k = min(_CHUNK, remaining)
            for idx in gen.integers(0, m, size=k).tolist():
                yield idx
            remaining -= k

    def _weight_table(self) -> tuple[np.ndarray, object]:
        w = list(self.weights)
        if all(float(x).is_integer() for x in w):
            cum = np.cumsum(np.asarray(w, dtype=np.int64))
            return cum, int(cum[-1])
        cum = np.cumsum(np.asarray(w, dtype=np.float64))
        return cum, float(cum[-1])

    def __iter__(self) -> Iterator[tuple[int, int]]:
        if self.kind == "uniform-edge":
            edges = self.graph.edges
            for idx in self.iter_indices():
                yield edges[idx]
            return
        gen = self._generator()
        cum, total = self._weight_table()
        remaining = self.horizon
        while remaining > 0:
            k = min(_CHUNK, remaining)
            flat = _sample_indices(gen, cum, total, 2 * k)
            pairs = flat.reshape(k, 2).tolist()
            for u, v in pairs:
                yield (u, v)
            remaining -= k


def uniform_edge_stream(g: Graph, horizon: int, seed: int) -> ArrivalStream:
    """Each step draws one slot of the edge multiset uniformly (so parallel
    edges are weighted by multiplicity)."""
    return ArrivalStream(
        kind="uniform-edge", horizon=horizon, seed=seed, graph=g
    )


def product_pair_stream(
    weights: Sequence[float], horizon: int, seed: int
) -> ArrivalStream:
    """Each step draws two i.i.d. vertices with probability proportional to
    their weights; equal endpoints occur naturally."""
    return ArrivalStream(
        kind="product-pair",
        horizon=horizon,
        seed=seed,
        weights=tuple(float(w) for w in weights),
    )
