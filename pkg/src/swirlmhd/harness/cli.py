"""``swirlmhd`` command line: simulate, verify, norms and sweep."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from ..evolve.runner import run
from ..exceptions import EXIT_OK, BlowUpError, ConfigError, DomainError, SwirlMHDError, VerificationFailure
from ..exponents import exponent_set
from ..functionals import dissipation_ledger
from ..grid import Parity, lp_norm, read_snapshot
from ..littlewood_paley import besov_report, embed_axisymmetric, embed_scalar
from ..recorder import Trajectory
from .config import RunConfig, load_config
from .corpus import generate_initial_data
from .report import SweepPoint, render_report, render_sweep, write_text
from .suites import REGISTRY, SuiteContext

__all__ = ["build_parser", "main"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swirlmhd", description="Axisymmetric pure-swirl MHD simulator and verification lab.")
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        help="Root logger level (logs go to stderr).",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="Integrate one configuration and write its diagnostics CSV.")
    simulate.add_argument("config", type=Path)
    simulate.add_argument("--out", type=Path, help="Diagnostics CSV (default: output.csv, else <name>.csv).")
    simulate.set_defaults(handler=_simulate)

    verify = commands.add_parser("verify", help="Run a verification suite and print its report.")
    verify.add_argument("suite", choices=(*REGISTRY.names, "all"))
    verify.add_argument("--seed", type=int, default=7)
    verify.add_argument("--report", type=Path, help="Also write the report to this file.")
    verify.add_argument("--quick", action="store_true", help="Smaller grids and shorter horizons.")
    verify.set_defaults(handler=_verify)

    norms = commands.add_parser("norms", help="Norms of a field snapshot.")
    norms.add_argument("snapshot", type=Path)
    norms.add_argument("--besov", help="s,p,r for an additional Besov norm (p and r accept 'inf').")
    norms.add_argument("--N", type=int, default=32, help="Cartesian box resolution for --besov.")
    norms.add_argument("--L", type=float, help="Cartesian box side for --besov (default: 2 max(Rmax, Lz)).")
    norms.set_defaults(handler=_norms)

    sweep = commands.add_parser("sweep", help="Rerun a configuration over values of one parameter.")
    sweep.add_argument("config", type=Path)
    sweep.add_argument("--param", required=True, help="Dotted key, e.g. initial.A_omega or p.")
    sweep.add_argument("--values", required=True, help="Comma-separated values.")
    sweep.add_argument("--out", type=Path, required=True, help="Summary CSV.")
    sweep.set_defaults(handler=_sweep)
    return parser


def _simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    out = args.out or (Path(cfg.output.csv) if cfg.output.csv else Path(f"{cfg.name}.csv"))
    out.parent.mkdir(parents=True, exist_ok=True)
    cfg = cfg.model_copy(update={"output": cfg.output.model_copy(update={"csv": str(out)})})
    result = run(cfg)
    M = result.trajectory.column("M")
    M0 = float(M[0])
    print(f"run {cfg.name}: {result.steps} steps of dt={result.dt:.6e}")
    print(f"  smallness: {'passed' if result.initial.smallness.passed else 'FAILED'}")
    print(f"  M(t_end)/M0 = {float(M[-1]) / M0 if M0 else 0.0:.6e}, max M/M0 = {float(np.max(M)) / M0 if M0 else 0.0:.6e}")
    print(f"  max one-step growth of max|r u^theta| = {result.max_swirl_increase:.6e}")
    print(f"  diagnostics: {out}")
    return EXIT_OK


def _verify(args: argparse.Namespace) -> int:
    reports = REGISTRY.run(args.suite, SuiteContext(seed=args.seed, quick=args.quick))
    text = render_report(reports, args.seed)
    sys.stdout.write(text)
    if args.report is not None:
        write_text(args.report, text)
    failed = [f"{report.suite}: {name}" for report in reports for name in report.failed]
    if failed:
        raise VerificationFailure(args.suite, failed)
    return EXIT_OK


def _parse_besov(raw: str) -> tuple[float, float, float]:
    parts = raw.split(",")
    if len(parts) != 3:
        raise DomainError(f"--besov expects s,p,r, got {raw!r}", None)
    try:
        s, p, r = (float(part) for part in parts)
    except ValueError:
        raise DomainError(f"--besov expects numbers, got {raw!r}", None) from None
    if not (p >= 1 and r >= 1):
        raise DomainError.out_of_range("(p, r)", (p, r), "[1, inf]")
    return s, p, r


def _norms(args: argparse.Namespace) -> int:
    f, time = read_snapshot(args.snapshot)
    print(f"{f.name} ({f.parity.value}) at t={time:.6g} on {f.grid.Nr}x{f.grid.Nz}")
    for label, p in (("L^3/2", 1.5), ("L^2", 2.0), ("L^3", 3.0), ("L^inf", math.inf)):
        print(f"  {label} = {lp_norm(f, p):.6e}")
    print(f"  ||r f||_inf = {lp_norm(f, math.inf, 1.0):.6e}")
    if args.besov:
        s, p, r = _parse_besov(args.besov)
        L = args.L if args.L is not None else 2.0 * max(f.grid.Rmax, f.grid.Lz)
        if f.parity is Parity.ODD:
            # an odd field is the swirl component of a vector
            zero = f.grid.zeros(Parity.ODD)
            field = embed_axisymmetric(zero, f, f.grid.zeros(Parity.EVEN), args.N, L)
        else:
            field = embed_scalar(f, args.N, L)
        report = besov_report(field, s, p, r, physical=True)
        print(f"  B^{s:g}_{p:g},{r:g} = {report.value:.6e} (energy outside the band {report.truncated_fraction:.3e})")
    return EXIT_OK


def _with_value(cfg: RunConfig, key: str, value: str, index: int) -> RunConfig:
    data: dict[str, Any] = cfg.model_dump()
    section, dot, field = key.partition(".")
    target = data.get(section) if dot else data
    name = field if dot else key
    if not isinstance(target, dict) or name not in target:
        raise ConfigError(f"unknown parameter {key!r}", key=key)
    target[name] = value
    data["name"] = f"{cfg.name}-{index:02d}"
    data["output"] = {**data["output"], "csv": None, "snapshots": None}
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"{key}={value}: {exc.errors()[0]['msg']}", key=key) from None


def _sweep_point(value: str, trajectory: Trajectory | None, cfg: RunConfig, smallness: bool, blew_up: bool) -> SweepPoint:
    if trajectory is None or not len(trajectory):
        nan = float("nan")
        return SweepPoint(value=value, final_M=nan, max_M_over_M0=nan, ledger_over_2M0=nan, smallness_passed=smallness, blew_up=blew_up)
    M = trajectory.column("M")
    M0 = float(M[0]) or 1.0
    ledger = dissipation_ledger(trajectory.rows, exponent_set(cfg.p))
    return SweepPoint(
        value=value,
        final_M=float(M[-1]),
        max_M_over_M0=float(np.max(M)) / M0,
        ledger_over_2M0=ledger / (2.0 * M0),
        smallness_passed=smallness,
        blew_up=blew_up,
    )


def _sweep(args: argparse.Namespace) -> int:
    base = load_config(args.config)
    values = [value.strip() for value in args.values.split(",") if value.strip()]
    if not values:
        raise ConfigError("--values is empty", key=args.param)
    configs = [_with_value(base, args.param, value, index) for index, value in enumerate(values)]
    points = []
    for value, cfg in zip(values, configs, strict=True):
        data = generate_initial_data(cfg)
        try:
            result = run(cfg, initial=data)
        except BlowUpError as error:
            logging.warning("sweep point %s=%s blew up at t=%.6g", args.param, value, error.time)
            points.append(_sweep_point(value, error.trajectory, cfg, data.smallness.passed, True))
        else:
            points.append(_sweep_point(value, result.trajectory, cfg, data.smallness.passed, False))
    write_text(args.out, render_sweep(args.param, points))
    print(f"sweep of {args.param} over {len(points)} values: {args.out}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(name)s: %(message)s")
    try:
        return int(args.handler(args))
    except SwirlMHDError as error:
        print(f"swirlmhd: {error}", file=sys.stderr)
        return error.exit_code
