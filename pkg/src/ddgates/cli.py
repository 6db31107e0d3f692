"""Command-line front end.

Subcommands: calibrate, compile, simulate, sweep, table1.  Exit codes:
0 on success, 1 on invalid arguments or configuration, 2 on a runtime
failure (calibration bracket, failed cell, unwritable output).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .compiler import CompileError, apply_amplitude_error, schedule_to_json
from .harness import (
    ConfigError,
    build_schedule,
    emit_report,
    load_config,
    resolve_noise,
    rows_to_csv,
    run_calibration,
    run_sweep,
    run_table1,
    simulate_cell,
)
from .noise import CalibrationError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddgates",
        description="Compile and simulate dynamically protected single-qubit gates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cal = sub.add_parser("calibrate", help="fit noise parameters to decay-time targets")
    cal.add_argument("--config", required=True, help="experiment config JSON")
    cal.add_argument("--out", help="path for the calibration artifact JSON")
    cal.add_argument("--seed", type=int, help="override the config seed")
    cal.set_defaults(func=cmd_calibrate)

    comp = sub.add_parser("compile", help="compile one gate schedule to JSON")
    comp.add_argument("--gate", required=True, help="H, NOT, PI8, or NOOP")
    comp.add_argument("--scheme", required=True, help="simple, simple_padded, bb1, xy4, xy8, or kdd")
    comp.add_argument("--tau", type=float, default=1e-5, help="inter-pulse delay in seconds")
    comp.add_argument("--epsilon", type=float, default=0.0, help="fractional pulse amplitude error")
    comp.add_argument("--out", help="write the schedule JSON here instead of stdout")
    comp.set_defaults(func=cmd_compile)

    sim = sub.add_parser("simulate", help="simulate one (gate, scheme, tau) cell")
    sim.add_argument("--config", required=True, help="experiment config JSON")
    sim.add_argument("--gate", required=True)
    sim.add_argument("--scheme", required=True)
    sim.add_argument("--tau", type=float, required=True)
    sim.add_argument("--epsilon", type=float, help="override the config amplitude error")
    sim.add_argument("--realizations", type=int, help="override the config realization count")
    sim.add_argument("--seed", type=int, help="override the config seed")
    sim.add_argument("--out", help="write the result CSV here instead of stdout")
    sim.set_defaults(func=cmd_simulate)

    sweep = sub.add_parser("sweep", help="simulate the configured gate/scheme/tau grid")
    sweep.add_argument("--config", required=True, help="experiment config JSON")
    sweep.add_argument("--out", help="write the results CSV here instead of stdout")
    sweep.add_argument("--summary", help="write a JSON fidelity summary here")
    sweep.add_argument("--realizations", type=int, help="override the config realization count")
    sweep.add_argument("--seed", type=int, help="override the config seed")
    sweep.add_argument("--jobs", type=int, default=1, help="worker processes (results are identical for any value)")
    sweep.set_defaults(func=cmd_sweep)

    table = sub.add_parser("table1", help="benchmark H, NOT, PI8 at their reference gate times")
    table.add_argument("--config", required=True, help="experiment config JSON")
    table.add_argument("--out", help="write the benchmark report JSON here instead of stdout")
    table.add_argument("--csv", help="also write the raw result rows CSV here")
    table.add_argument("--realizations", type=int, help="override the config realization count")
    table.add_argument("--seed", type=int, help="override the config seed")
    table.set_defaults(func=cmd_table1)

    return parser


def _apply_overrides(cfg, args):
    updates = {}
    for field in ("seed", "realizations", "epsilon"):
        value = getattr(args, field, None)
        if value is not None:
            updates[field] = value
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _write_or_print(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text, encoding="utf-8")


def cmd_calibrate(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    result = run_calibration(cfg, args.out)
    print(f"sigma = {result.params.sigma!r} rad/s")
    print(f"tau_c = {result.params.tau_c!r} s")
    print(f"sigma_static = {result.params.sigma_static!r} rad/s")
    print(f"fitted T2* = {result.fitted_t2_star!r} s")
    print(f"fitted T2 (echo) = {result.fitted_t2_hahn!r} s")
    if args.out:
        print(f"wrote {args.out}")
    return 0


def cmd_compile(args) -> int:
    schedule = build_schedule(args.gate, args.scheme, args.tau)
    if args.epsilon:
        schedule = apply_amplitude_error(schedule, args.epsilon)
    _write_or_print(schedule_to_json(schedule), args.out)
    return 0


def cmd_simulate(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    noise_model = resolve_noise(cfg)
    row = simulate_cell(
        args.gate, args.scheme, args.tau, noise_model,
        cfg.epsilon, cfg.realizations, cfg.seed,
    )
    _write_or_print(rows_to_csv([row]), args.out)
    if row.error:
        print(f"cell failed: {row.error}", file=sys.stderr)
        return 2
    return 0


def cmd_sweep(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    rows = run_sweep(cfg, jobs=args.jobs)
    if args.out is None and args.summary is None:
        sys.stdout.write(rows_to_csv(rows))
        return 0
    emit_report(rows, csv_path=args.out, summary_path=args.summary)
    if args.out:
        print(f"wrote {args.out}")
    if args.summary:
        print(f"wrote {args.summary}")
    return 0


def cmd_table1(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    rows, report = run_table1(cfg)
    if args.csv:
        Path(args.csv).write_text(rows_to_csv(rows), encoding="utf-8")
    _write_or_print(json.dumps(report, sort_keys=True, indent=2) + "\n", args.out)
    if any(row.error for row in rows):
        print("one or more benchmark cells failed", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ConfigError, CompileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CalibrationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
