"""Experiment orchestration: seeded runs, exact prefix checks, drift
estimation, and CSV/JSON emission.

Arrival randomness and algorithm coins come from separate streams derived
from one user seed, so switching engines never perturbs the arrival
sequence: paired comparisons across algorithms see identical arrivals.
"""

from __future__ import annotations

import json
import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .arrivals import product_pair_stream, uniform_edge_stream
from .decomposition import (
    Decomposition,
    decomposition_to_json,
    default_alpha,
    full_decomposition,
    load_decomposition,
)
from .graph import Graph, read_edge_list
from .orientation import (
    OrientationState,
    OrientedEdge,
    composed_step,
    fresh_composed_states,
    greedy_step,
    log_potential_of,
    one_plus_beta_step,
    potential_of,
    random_step,
)

ALGORITHMS = ("greedy", "random", "one-plus-beta", "composed")

_COIN_SALT = 0x9E3779B97F4A7C15  # splits the user seed into a coin stream


def derive_coin_seed(seed: int) -> int:
    return (seed * _COIN_SALT + 0xA5A5A5A5) % (1 << 63)


def auto_lambda(n: int, horizon: int) -> float:
    """Potential parameter for the analyzed regime: min(1/2, 1/ceil(log2(nT))^4)."""
    k = max(1, math.ceil(math.log2(max(2, n * max(1, horizon)))))
    return min(0.5, 1.0 / k**4)


def auto_record_every(horizon: int) -> int:
    """Stride keeping recorded rows near 1000 regardless of horizon."""
    if horizon <= 1000:
        return 1
    return 1 << math.ceil(math.log2(horizon / 1000))


@dataclass
class ExperimentConfig:
    """One experiment: an engine, a graph, a horizon and some seeds.

    ``lam``, ``beta`` and ``alpha`` may be left as None for the auto rules
    (alpha from the decomposition default, beta = alpha, lam from the
    analyzed regime).  ``checkpoints`` asks for the running maximum
    discrepancy to be captured at specific steps.
    """

    algorithm: str
    graph: Union[Graph, str, Path]
    horizon: int
    seeds: Sequence[int] = (0,)
    lam: Optional[float] = None
    beta: Optional[float] = None
    alpha: Optional[float] = None
    record_every: Optional[int] = None
    checkpoints: Sequence[int] = ()
    decomposition: Union[Decomposition, str, Path, None] = None
    keep_log: bool = False

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(
                f"unknown algorithm {self.algorithm!r}; pick from {ALGORITHMS}"
            )
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.lam is not None and not (self.lam > 0):
            raise ValueError("lambda must be positive")
        if self.beta is not None and not (0.0 <= self.beta <= 1.0):
            raise ValueError("beta must lie in [0, 1]")
        if self.alpha is not None and not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must lie in (0, 1]")
        if self.record_every is not None and self.record_every < 1:
            raise ValueError("record_every must be at least 1")


@dataclass(frozen=True)
class ResolvedParams:
    lam: float
    beta: float
    alpha: float
    record_every: int

    def regime_warnings(self) -> list[str]:
        """Parameter-regime conditions of the analysis; violations are
        reported, never enforced."""
        out = []
        if self.alpha < 6 * self.lam:
            out.append(
                f"alpha={self.alpha:.6g} < 6*lambda={6 * self.lam:.6g}: outside "
                "the analyzed greedy-on-expander regime"
            )
        if self.beta < 6 * self.lam:
            out.append(
                f"beta={self.beta:.6g} < 6*lambda={6 * self.lam:.6g}: outside "
                "the analyzed mixing regime"
            )
        return out


def resolve_params(config: ExperimentConfig, g: Graph) -> ResolvedParams:
    alpha = config.alpha if config.alpha is not None else default_alpha(g.n)
    beta = config.beta if config.beta is not None else alpha
    lam = config.lam if config.lam is not None else auto_lambda(g.n, config.horizon)
    stride = (
        config.record_every
        if config.record_every is not None
        else auto_record_every(config.horizon)
    )
    return ResolvedParams(lam=lam, beta=beta, alpha=alpha, record_every=stride)


@dataclass(frozen=True)
class RunRow:
    step: int
    max_disc: int
    argmax: int
    potential: float


@dataclass
class RunRecord:
    """Per-seed outcome: strided rows plus an every-step summary."""

    seed: int
    algorithm: str
    horizon: int
    rows: list[RunRow]
    max_disc: int  # max over *all* steps, not just recorded rows
    wall_time: float
    checkpoint_max: dict[int, int] = field(default_factory=dict)
    log: Optional[list[OrientedEdge]] = None


def _current_row(step: int, disc: Sequence[int], phi: float) -> RunRow:
    best_v = 0
    best = -1
    for v, d in enumerate(disc):
        a = abs(d)
        if a > best:
            best = a
            best_v = v
    return RunRow(step=step, max_disc=best, argmax=best_v, potential=phi)


def _run_single(
    g: Graph,
    algorithm: str,
    horizon: int,
    seed: int,
    params: ResolvedParams,
    decomposition: Optional[Decomposition],
    checkpoints: Sequence[int],
    keep_log: bool,
) -> RunRecord:
    t0 = time.perf_counter()
    coin_rng = random.Random(derive_coin_seed(seed))
    stride = params.record_every
    checkpoint_at = set(int(c) for c in checkpoints)
    rows: list[RunRow] = []
    log: Optional[list[OrientedEdge]] = [] if keep_log else None
    run_max = 0
    checkpoint_max: dict[int, int] = {}

    if algorithm == "composed":
        if decomposition is None:
            raise ValueError("composed mode requires a decomposition")
        states = fresh_composed_states(decomposition, params.lam)
        global_disc = [0] * g.n
        step = 0
        for ei in uniform_edge_stream(g, horizon, seed).iter_indices():
            step += 1
            oe = composed_step(states, decomposition, ei, coin_rng, step=step)
            global_disc[oe.tail] -= 1
            global_disc[oe.head] += 1
            a = abs(global_disc[oe.tail])
            b = abs(global_disc[oe.head])
            if a > run_max:
                run_max = a
            if b > run_max:
                run_max = b
            if log is not None:
                log.append(oe)
            if step % stride == 0 or step == horizon:
                phi = potential_of(global_disc, params.lam)
                rows.append(_current_row(step, global_disc, phi))
            if step in checkpoint_at:
                checkpoint_max[step] = run_max
    else:
        state = OrientationState.fresh(g.n, params.lam)
        disc = state.disc
        if algorithm == "one-plus-beta":
            stream = iter(product_pair_stream(g.degrees, horizon, seed))
            beta = params.beta

            def engine(pair):
                return one_plus_beta_step(state, pair, beta, coin_rng)

        else:
            stream = iter(uniform_edge_stream(g, horizon, seed))
            if algorithm == "greedy":

                def engine(pair):
                    return greedy_step(state, pair, coin_rng)

            else:

                def engine(pair):
                    return random_step(state, pair, coin_rng)

        step = 0
        for pair in stream:
            step += 1
            oe = engine(pair)
            if oe is not None:
                a = abs(disc[oe.tail])
                b = abs(disc[oe.head])
                if a > run_max:
                    run_max = a
                if b > run_max:
                    run_max = b
                if log is not None:
                    log.append(OrientedEdge(oe.tail, oe.head, step))
            if step % stride == 0 or step == horizon:
                phi = state.refresh_potential()
                rows.append(_current_row(step, disc, phi))
            if step in checkpoint_at:
                checkpoint_max[step] = run_max

    return RunRecord(
        seed=seed,
        algorithm=algorithm,
        horizon=horizon,
        rows=rows,
        max_disc=run_max,
        wall_time=time.perf_counter() - t0,
        checkpoint_max=checkpoint_max,
        log=log,
    )


def _load_graph(graph: Union[Graph, str, Path]) -> Graph:
    if isinstance(graph, Graph):
        return graph
    return read_edge_list(graph)


def _resolve_decomposition(config: ExperimentConfig, g: Graph, alpha: float):
    if config.algorithm != "composed":
        return None
    dec = config.decomposition
    if dec is None:
        return full_decomposition(g, alpha)
    if isinstance(dec, Decomposition):
        return dec
    return load_decomposition(dec, g)


def _worker(args) -> RunRecord:
    return _run_single(*args)


def run_experiment(
    config: ExperimentConfig, workers: int = 1
) -> list[RunRecord]:
    """Run every seed of the experiment; results are ordered by seed list.

    With ``workers > 1`` the seeds fan out to a process pool (each worker
    owns its stream and state), which cannot change any output.
    """
    config.validate()
    g = _load_graph(config.graph)
    params = resolve_params(config, g)
    decomposition = _resolve_decomposition(config, g, params.alpha)
    jobs = [
        (
            g,
            config.algorithm,
            config.horizon,
            int(seed),
            params,
            decomposition,
            tuple(config.checkpoints),
            config.keep_log,
        )
        for seed in config.seeds
    ]
    if workers <= 1 or len(jobs) == 1:
        return [_worker(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_worker, jobs))


# ---------------------------------------------------------------------------
# Exact prefix check


@dataclass(frozen=True)
class PrefixMargin:
    k: int
    sign: str  # "-1" for top-k sets, "+1" for their complements
    rho: float
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class PrefixCheckReport:
    beta: float
    order: tuple[int, ...]
    margins: tuple[PrefixMargin, ...]
    tolerance: float

    @property
    def violations(self) -> tuple[PrefixMargin, ...]:
        return tuple(m for m in self.margins if m.margin < -self.tolerance)

    @property
    def worst_margin(self) -> float:
        return min(m.margin for m in self.margins)


def good_prefix_check(
    g: Graph,
    beta: float,
    disc: Optional[Sequence[int]] = None,
    tolerance: float = 1e-12,
) -> PrefixCheckReport:
    """For every prefix of the discrepancy-sorted vertex order, compare the
    chance that the arriving edge touches the prefix against the
    product-distribution bound ``(1 + beta - beta*rho) * rho``.

    Both sides are computed exactly from volumes and crossing counts; no
    sampling.  The ``+1`` rows run the symmetric check on the complements.
    """
    if not (0.0 <= beta <= 1.0):
        raise ValueError("beta must lie in [0, 1]")
    if g.m == 0:
        raise ValueError("prefix check needs at least one edge")
    if disc is None:
        disc = [0] * g.n
    if len(disc) != g.n:
        raise ValueError("discrepancy vector length must match vertex count")
    order = sorted(range(g.n), key=lambda v: (-disc[v], v))
    deg = g.degrees
    adj = g.adjacency
    total = g.total_volume
    in_s = bytearray(g.n)
    vol_s = 0
    crossing = 0
    margins: list[PrefixMargin] = []
    for k, v in enumerate(order, start=1):
        for nbr, _ in adj[v]:
            crossing += -1 if in_s[nbr] else 1
        in_s[v] = 1
        vol_s += deg[v]
        rho = vol_s / total
        lhs = (vol_s + crossing) / total
        rhs = (1.0 + beta - beta * rho) * rho
        margins.append(PrefixMargin(k, "-1", rho, lhs, rhs))
        vol_t = total - vol_s
        rho_t = vol_t / total
        lhs_t = (vol_t + crossing) / total
        rhs_t = (1.0 + beta - beta * rho_t) * rho_t
        margins.append(PrefixMargin(k, "+1", rho_t, lhs_t, rhs_t))
    return PrefixCheckReport(
        beta=beta,
        order=tuple(order),
        margins=tuple(margins),
        tolerance=tolerance,
    )


# ---------------------------------------------------------------------------
# Monte Carlo drift estimate


@dataclass(frozen=True)
class DriftEstimate:
    """Mean one-step potential change of the mixed process, with a normal
    99% confidence interval and the guard/regime diagnostics."""

    mean: float
    std_error: float
    ci_low: float
    ci_high: float
    samples: int
    guarded: bool  # log Phi within the analyzed bound 10*log(n*horizon)
    log_potential: float
    guard_log_bound: float
    min_weight_fraction: float  # n * min(w) / sum(w)
    beta_regime_ok: bool  # beta >= 6*lambda
    gamma_regime_ok: bool  # min-weight fraction >= 16*lambda^(1/4)


_Z99 = 2.5758293035489004


def drift_estimate(
    disc: Sequence[int],
    weights: Sequence[float],
    lam: float,
    beta: float,
    samples: int,
    seed: int,
    horizon: int = 100_000,
) -> DriftEstimate:
    """Monte Carlo surrogate drift: sample endpoint pairs i.i.d. from the
    weights, resolve each with the mixed rule, and average the potential
    change of moving one unit from the minus vertex to the plus vertex.

    When the two endpoints coincide both terms are still charged (the
    surrogate is what the analysis bounds; the true step would be a no-op).
    """
    if not (0.0 <= beta <= 1.0):
        raise ValueError("beta must lie in [0, 1]")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if samples < 2:
        raise ValueError("need at least two samples for an interval")
    w = np.asarray(weights, dtype=np.float64)
    if w.size == 0 or np.any(w < 0) or w.sum() <= 0:
        raise ValueError("weights must be non-negative with positive total")
    d = np.asarray(disc, dtype=np.float64)
    if d.shape != w.shape:
        raise ValueError("disc and weights must have the same length")

    n = d.size
    log_phi = log_potential_of([int(x) for x in disc], lam)
    guard_bound = 10.0 * math.log(max(2, n * max(1, horizon)))
    min_frac = float(n * w.min() / w.sum())

    gen = np.random.default_rng(seed)
    cum = np.cumsum(w)
    total = float(cum[-1])
    u = np.searchsorted(cum, gen.random(samples) * total, side="right")
    v = np.searchsorted(cum, gen.random(samples) * total, side="right")
    greedy_mask = gen.random(samples) < beta
    bits = gen.integers(0, 2, size=samples).astype(bool)
    du, dv = d[u], d[v]
    greedy_minus_u = (du > dv) | ((du == dv) & ~bits)
    minus_u = np.where(greedy_mask, greedy_minus_u, ~bits)
    d_minus = np.where(minus_u, du, dv)
    d_plus = np.where(minus_u, dv, du)
    values = (
        np.cosh(lam * (d_minus - 1.0))
        - np.cosh(lam * d_minus)
        + np.cosh(lam * (d_plus + 1.0))
        - np.cosh(lam * d_plus)
    )
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(samples))
    return DriftEstimate(
        mean=mean,
        std_error=se,
        ci_low=mean - _Z99 * se,
        ci_high=mean + _Z99 * se,
        samples=samples,
        guarded=log_phi <= guard_bound,
        log_potential=log_phi,
        guard_log_bound=guard_bound,
        min_weight_fraction=min_frac,
        beta_regime_ok=beta >= 6.0 * lam,
        gamma_regime_ok=min_frac >= 16.0 * lam**0.25,
    )


def drift_estimate_to_json(est: DriftEstimate) -> dict:
    return {
        "mean": est.mean,
        "std_error": est.std_error,
        "ci99": [est.ci_low, est.ci_high],
        "samples": est.samples,
        "guarded": est.guarded,
        "log_potential": est.log_potential,
        "guard_log_bound": est.guard_log_bound,
        "min_weight_fraction": est.min_weight_fraction,
        "beta_regime_ok": est.beta_regime_ok,
        "gamma_regime_ok": est.gamma_regime_ok,
    }


# ---------------------------------------------------------------------------
# Emission

RUN_CSV_HEADER = "step,max_disc,argmax,potential"
LOG_CSV_HEADER = "step,tail,head,max_disc,potential"


def _atomic_write(path: Union[str, Path], text: str) -> None:
    """Write whole-file or not at all (partial writes are cleaned up)."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def _fmt(x: float) -> str:
    return format(x, ".12g")


def write_run_csv(record: RunRecord, path: Union[str, Path]) -> None:
    lines = [RUN_CSV_HEADER]
    for row in record.rows:
        lines.append(
            f"{row.step},{row.max_disc},{row.argmax},{_fmt(row.potential)}"
        )
    _atomic_write(path, "\n".join(lines) + "\n")


def render_orientation_log_csv(
    log: Sequence[tuple[int, int]] | Sequence[OrientedEdge],
    n: int,
    lam: float,
    include_step: bool = True,
) -> str:
    """Replay an orientation sequence, emitting per-step running stats.

    With ``include_step`` false the step column is dropped (the offline
    oracle's format, where rows have no temporal meaning).
    """
    header = LOG_CSV_HEADER if include_step else "tail,head,max_disc,potential"
    lines = [header]
    disc = [0] * n
    hist = {0: n}  # |disc| histogram, keeps the current max O(1) per step
    cur_max = 0
    phi = float(n)
    for step, entry in enumerate(log, start=1):
        tail, head = entry[0], entry[1]
        phi += (
            math.cosh(lam * (disc[tail] - 1))
            - math.cosh(lam * disc[tail])
            + math.cosh(lam * (disc[head] + 1))
            - math.cosh(lam * disc[head])
        )
        for v, delta in ((tail, -1), (head, 1)):
            old = abs(disc[v])
            disc[v] += delta
            new = abs(disc[v])
            hist[old] -= 1
            hist[new] = hist.get(new, 0) + 1
            if new > cur_max:
                cur_max = new
        while hist.get(cur_max, 0) == 0:
            cur_max -= 1
        prefix = f"{step}," if include_step else ""
        lines.append(f"{prefix}{tail},{head},{cur_max},{_fmt(phi)}")
    return "\n".join(lines) + "\n"


def write_orientation_log_csv(
    log: Sequence[tuple[int, int]] | Sequence[OrientedEdge],
    n: int,
    lam: float,
    path: Union[str, Path],
    include_step: bool = True,
) -> None:
    _atomic_write(path, render_orientation_log_csv(log, n, lam, include_step))


def write_decomposition_json(dec: Decomposition, path: Union[str, Path]) -> None:
    _atomic_write(path, json.dumps(decomposition_to_json(dec), indent=2) + "\n")


def write_prefix_report_csv(
    report: PrefixCheckReport, path: Union[str, Path]
) -> None:
    lines = ["k,sign,rho,lhs,rhs,margin"]
    for m in report.margins:
        lines.append(
            f"{m.k},{m.sign},{_fmt(m.rho)},{_fmt(m.lhs)},{_fmt(m.rhs)},"
            f"{_fmt(m.margin)}"
        )
    _atomic_write(path, "\n".join(lines) + "\n")


def summarize(records: Sequence[RunRecord]) -> dict:
    return {
        "runs": [
            {
                "seed": r.seed,
                "algorithm": r.algorithm,
                "horizon": r.horizon,
                "max_disc": r.max_disc,
                "wall_time_s": round(r.wall_time, 4),
                "checkpoints": {str(k): v for k, v in sorted(r.checkpoint_max.items())},
            }
            for r in records
        ],
        "max_disc_overall": max((r.max_disc for r in records), default=0),
    }
