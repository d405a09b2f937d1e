"""Command-line surface: simulate, bounds, optimal-field, pressure, verify, resume.

Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from .bounds import BoundInput, recover_pressure, tmin
from .config import (
    CsvSink,
    SnapshotSink,
    config_hash,
    config_text_of,
    parse_config,
    read_checkpoint,
)
from .errors import StiffnessError, VectormixError
from .harness import run_suite
from .mixer import optimal_velocity
from .dynamics import evolve
from .series import NormSeries
from .snapshots import read_snapshot, write_scalar_snapshot, write_snapshot


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vectormix",
        description="Pseudospectral optimal-mixing simulator for passive vector fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a simulation from a config file")
    p_sim.add_argument("--config", required=True)

    p_bounds = sub.add_parser("bounds", help="evaluate the minimal mixing time")
    p_bounds.add_argument("--q", required=True, type=float)
    p_bounds.add_argument("--alpha", required=True, type=float)
    p_bounds.add_argument("--d", required=True, type=int)
    p_bounds.add_argument("--h-norm", required=True, type=float, dest="h_norm")
    p_bounds.add_argument("--l2-norm", required=True, type=float, dest="l2_norm")
    p_bounds.add_argument("--budget", required=True, type=float)
    p_bounds.add_argument("--c", type=float, default=1.0)
    p_bounds.add_argument("--r", type=float, default=None)

    p_opt = sub.add_parser("optimal-field", help="optimal stirring field for a snapshot")
    p_opt.add_argument("--in", required=True, dest="input")
    p_opt.add_argument("--alpha", required=True, type=float)
    p_opt.add_argument("--out", required=True)

    p_pres = sub.add_parser("pressure", help="recover the pressure diagnostic")
    p_pres.add_argument("--in-u", required=True, dest="in_u")
    p_pres.add_argument("--in-U", required=True, dest="in_bigu")
    p_pres.add_argument("--out", required=True)

    p_ver = sub.add_parser("verify", help="run scheme-verification suites")
    p_ver.add_argument(
        "--suite",
        required=True,
        choices=["energy", "growth", "stability", "converge", "groenwall", "all"],
    )

    p_res = sub.add_parser("resume", help="continue a run from a checkpoint")
    p_res.add_argument("--checkpoint", required=True)

    return parser


def _cmd_simulate(config_path: str) -> int:
    with open(config_path, "r", encoding="utf-8") as handle:
        text = handle.read()
    config = parse_config(text)
    return _run_simulation(config, config_path, t0=0.0, u0=None, dt0=None)


def _run_simulation(config, config_path, t0, u0, dt0, existing_rows=(), snap_start=0):
    os.makedirs(config.out_dir, exist_ok=True)
    csv_sink = CsvSink(os.path.join(config.out_dir, "series.csv"), existing_rows)
    sinks = [csv_sink]
    if config.snapshot_interval > 0:
        sinks.append(
            SnapshotSink(
                config.out_dir,
                config.alpha,
                config_text_of(config),
                config_path,
                start_index=snap_start,
            )
        )
    try:
        evolve(
            config,
            config.build_provider(),
            sinks=sinks,
            t0=t0,
            u0=u0,
            dt0=dt0,
            freeze_per_step=config.freeze_per_step(),
        )
    except StiffnessError as exc:
        csv_sink.close()
        print(f"error: {exc}", file=sys.stderr)
        return 2
    csv_sink.close()
    return 0


def _cmd_bounds(args) -> int:
    inp = BoundInput(
        q=args.q,
        alpha=args.alpha,
        d=args.d,
        h_norm0=args.h_norm,
        l2_norm0=args.l2_norm,
        budget=args.budget,
        C=args.c,
        r=args.r,
    )
    result = tmin(inp)
    value = "inf" if math.isinf(result.t_min) else f"{result.t_min:.12g}"
    print(f"t_min={value}")
    return 0


def _cmd_optimal_field(args) -> int:
    u, t, _ = read_snapshot(args.input)
    result = optimal_velocity(u, args.alpha)
    write_snapshot(args.out, result.U, t, args.alpha)
    print(f"{result.decay_rate:.17g}")
    return 0


def _cmd_pressure(args) -> int:
    u, t, alpha = read_snapshot(args.in_u)
    U, _, _ = read_snapshot(args.in_bigu)
    p = recover_pressure(u, U)
    write_scalar_snapshot(args.out, p, t, alpha)
    return 0


def _cmd_verify(suite: str) -> int:
    reports = run_suite(suite)
    for report in reports:
        print(report.to_json())
    return 0 if all(r.passed for r in reports) else 2


def _cmd_resume(checkpoint_path: str) -> int:
    info = read_checkpoint(checkpoint_path)
    config_path = info["config_path"]
    with open(config_path, "r", encoding="utf-8") as handle:
        text = handle.read()
    config = parse_config(text)
    stored = info["config_sha256"]
    current = config_hash(config_text_of(config))
    if stored != current:
        print(
            f"error: config hash mismatch (checkpoint {stored[:12]}..., "
            f"current {current[:12]}...); refusing to resume",
            file=sys.stderr,
        )
        return 1
    u0, t_snap, _ = read_snapshot(info["snapshot"])
    dt_last = float(info["dt_last"])
    csv_path = os.path.join(config.out_dir, "series.csv")
    existing = []
    if os.path.exists(csv_path):
        old = NormSeries.from_csv(csv_path)
        existing = [row for row in old.rows if row[0] < t_snap - 1e-12]
    return _run_simulation(
        config,
        config_path,
        t0=t_snap,
        u0=u0,
        dt0=dt_last if dt_last > 0 else None,
        existing_rows=existing,
        snap_start=int(info.get("snap_index", -1)) + 1,
    )


def run_cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        if args.command == "simulate":
            return _cmd_simulate(args.config)
        if args.command == "bounds":
            return _cmd_bounds(args)
        if args.command == "optimal-field":
            return _cmd_optimal_field(args)
        if args.command == "pressure":
            return _cmd_pressure(args)
        if args.command == "verify":
            return _cmd_verify(args.suite)
        if args.command == "resume":
            return _cmd_resume(args.checkpoint)
    except StiffnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (VectormixError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


def main() -> int:
    return run_cli(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
