"""Command-line front end.

Exit codes: 0 success, 1 usage or I/O problems, 2 an invariant violation was
detected (structural decomposition checks or a failed prefix inequality).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .decomposition import InvariantViolation, full_decomposition
from .graph import read_edge_list
from .harness import (
    ExperimentConfig,
    drift_estimate,
    drift_estimate_to_json,
    good_prefix_check,
    resolve_params,
    run_experiment,
    summarize,
    write_decomposition_json,
    write_orientation_log_csv,
    write_prefix_report_csv,
    write_run_csv,
)
from .orientation import offline_orient
from . import harness


def _auto_float(text: str) -> Optional[float]:
    if text.lower() == "auto":
        return None
    return float(text)


def _parse_seeds(text: str) -> list[int]:
    """A bare integer N means seeds 0..N-1; a comma list is taken verbatim
    (use a trailing comma, e.g. ``7,``, to run the single seed 7)."""
    if "," in text:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    return list(range(int(text)))


def _seed_csv_path(base: Path, seed: int, many: bool) -> Path:
    if not many:
        return base
    return base.with_name(f"{base.stem}_seed{seed}{base.suffix}")


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = ExperimentConfig(
        algorithm=args.algo,
        graph=args.graph,
        horizon=args.steps,
        seeds=args.seeds,
        lam=args.lam,
        beta=args.beta,
        alpha=args.alpha,
        record_every=args.record_every,
        decomposition=args.decomp,
        keep_log=args.log is not None,
    )
    g = read_edge_list(args.graph)
    params = resolve_params(config, g)
    for warning in params.regime_warnings():
        print(f"warning: {warning}", file=sys.stderr)
    records = run_experiment(config, workers=args.workers)
    csv_path = Path(args.csv)
    many = len(records) > 1
    for rec in records:
        write_run_csv(rec, _seed_csv_path(csv_path, rec.seed, many))
    if args.log is not None:
        log_path = Path(args.log)
        for rec in records:
            write_orientation_log_csv(
                rec.log, g.n, params.lam, _seed_csv_path(log_path, rec.seed, many)
            )
    if not args.no_fig:
        from .plotting import save_run_figure

        fig_path = Path(args.fig) if args.fig else csv_path.with_suffix(".png")
        save_run_figure(records, fig_path, title=f"{args.algo} on {csv_path.stem}")
    print(json.dumps(summarize(records), indent=2))
    return 0


def _cmd_decompose(args: argparse.Namespace) -> int:
    g = read_edge_list(args.input)
    dec = full_decomposition(g, alpha=args.alpha)
    write_decomposition_json(dec, args.out)
    if args.fig:
        from .plotting import save_membership_figure

        save_membership_figure(dec, args.fig)
    print(
        json.dumps(
            {
                "parts": len(dec.parts),
                "rounds": dec.rounds,
                "alpha": dec.alpha,
                "max_membership": max(dec.membership, default=0),
            }
        )
    )
    return 0


def _cmd_check_prefix(args: argparse.Namespace) -> int:
    g = read_edge_list(args.graph)
    vectors: list[list[int]] = [[0] * g.n]
    rng = np.random.default_rng(args.seed)
    for _ in range(args.vectors):
        vec = rng.integers(-10, 11, size=g.n)
        vec[-1] -= vec.sum()
        vectors.append([int(x) for x in vec])
    worst = None
    violated = False
    for disc in vectors:
        report = good_prefix_check(g, args.beta, disc)
        if worst is None or report.worst_margin < worst.worst_margin:
            worst = report
        violated = violated or bool(report.violations)
    assert worst is not None
    if args.csv:
        write_prefix_report_csv(worst, args.csv)
    if args.fig:
        from .plotting import save_margin_figure

        save_margin_figure(worst, args.fig)
    print(
        json.dumps(
            {
                "beta": args.beta,
                "vectors_checked": len(vectors),
                "worst_margin": worst.worst_margin,
                "violations": len(worst.violations),
            }
        )
    )
    if violated:
        print("prefix inequality violated", file=sys.stderr)
        return 2
    return 0


def _cmd_offline(args: argparse.Namespace) -> int:
    g = read_edge_list(args.graph)
    orientation = offline_orient(g)
    lam = harness.auto_lambda(g.n, max(1, g.m))
    if args.csv:
        write_orientation_log_csv(
            orientation, g.n, lam, args.csv, include_step=False
        )
    else:
        sys.stdout.write(
            harness.render_orientation_log_csv(
                orientation, g.n, lam, include_step=False
            )
        )
    return 0


def _cmd_drift(args: argparse.Namespace) -> int:
    g = read_edge_list(args.graph)
    if args.disc:
        disc = [int(tok) for tok in args.disc.split(",")]
    else:
        disc = [0] * g.n
    est = drift_estimate(
        disc=disc,
        weights=g.degrees,
        lam=args.lam,
        beta=args.beta,
        samples=args.samples,
        seed=args.seed,
        horizon=args.steps,
    )
    print(json.dumps(drift_estimate_to_json(est), indent=2))
    if not est.guarded:
        print("warning: potential exceeds the guard bound; estimate is "
              "unguarded", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgeorient",
        description="Online edge-orientation simulators and expander "
        "decomposition tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run an online orientation process")
    sim.add_argument("--algo", required=True,
                     choices=["greedy", "random", "one-plus-beta", "composed"])
    sim.add_argument("--graph", required=True, help="edge-list file")
    sim.add_argument("--steps", type=int, default=100_000)
    sim.add_argument("--seeds", type=_parse_seeds, default=[0],
                     help="count N (runs seeds 0..N-1) or comma list")
    sim.add_argument("--lambda", dest="lam", type=_auto_float, default=None,
                     metavar="V|auto")
    sim.add_argument("--beta", type=_auto_float, default=None, metavar="V|auto")
    sim.add_argument("--alpha", type=_auto_float, default=None, metavar="V|auto")
    sim.add_argument("--csv", required=True, help="per-seed output CSV path")
    sim.add_argument("--record-every", type=int, default=None)
    sim.add_argument("--decomp", default=None,
                     help="decomposition JSON for composed mode "
                     "(default: built on the fly)")
    sim.add_argument("--log", default=None,
                     help="also write the full orientation log CSV here")
    sim.add_argument("--fig", default=None,
                     help="figure path (default: alongside the CSV)")
    sim.add_argument("--no-fig", action="store_true")
    sim.add_argument("--workers", type=int, default=1)
    sim.set_defaults(func=_cmd_simulate)

    dec = sub.add_parser("decompose", help="expander-decompose a graph")
    dec.add_argument("--input", required=True, help="edge-list file")
    dec.add_argument("--alpha", type=_auto_float, default=None, metavar="V|auto")
    dec.add_argument("--out", required=True, help="JSON output path")
    dec.add_argument("--fig", default=None, help="membership histogram path")
    dec.set_defaults(func=_cmd_decompose)

    chk = sub.add_parser("check-prefix",
                         help="exact prefix inequality margins")
    chk.add_argument("--graph", required=True)
    chk.add_argument("--beta", type=float, required=True)
    chk.add_argument("--vectors", type=int, default=5,
                     help="random discrepancy orderings to try besides zero")
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--csv", default=None)
    chk.add_argument("--fig", default=None)
    chk.set_defaults(func=_cmd_check_prefix)

    off = sub.add_parser("offline", help="offline orientation with max "
                         "discrepancy at most 1")
    off.add_argument("--graph", required=True)
    off.add_argument("--csv", default=None, help="default: stdout")
    off.set_defaults(func=_cmd_offline)

    dr = sub.add_parser("drift", help="Monte Carlo one-step drift estimate")
    dr.add_argument("--graph", required=True)
    dr.add_argument("--lambda", dest="lam", type=float, required=True)
    dr.add_argument("--beta", type=float, required=True)
    dr.add_argument("--samples", type=int, default=10_000)
    dr.add_argument("--seed", type=int, default=0)
    dr.add_argument("--steps", type=int, default=100_000,
                    help="horizon used by the potential guard")
    dr.add_argument("--disc", default=None,
                    help="comma-separated discrepancy vector (default zeros)")
    dr.set_defaults(func=_cmd_drift)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 1
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
