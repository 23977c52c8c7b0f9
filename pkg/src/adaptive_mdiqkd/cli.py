"""Command line front end: point evaluation, sweeps, validation, deficit tables.

Exit codes: 0 success, 1 configuration error, 2 validation failure, 3 I/O error.
Outputs are deterministic for a given (config, seed): floats are rendered with
their shortest round-trip representation and no timestamps are emitted.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .config import RunConfig, load_config
from .devices import ChannelParams
from .errors import ConfigError, NoCrossoverError, ParameterError
from .keyrate import RateReport, crossover_distance, rate_report, sweep_reports
from .montecarlo import DEFAULT_VALIDATION_GRID, validate_agreement
from .pairing_stats import pairing_deficit_exact, pairing_deficit_normal

SCHEMA_VERSION = "v1"
SWEEP_COLUMNS = (
    "L_km",
    "eta_half",
    "R_adaptive",
    "R_original",
    "G_adaptive",
    "G_original",
    "key_hz_adaptive",
    "e_z",
    "e_x",
    "m_required",
    "crossed_over",
)
DEFICIT_TABLE_M = (1, 2, 5, 10, 100, 1000, 10000)
DEFICIT_TABLE_P = (0.1, 0.3, 0.5, 0.7, 0.9)
LOW_POWER_TRIALS = 1000


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _provenance(command: str, cfg: RunConfig) -> list[str]:
    params = json.dumps(cfg.resolved_parameters(), sort_keys=True)
    return [f"# adaptive-mdiqkd {command} {SCHEMA_VERSION}", f"# params: {params}"]


def _write_text(path: str | Path, text: str) -> None:
    with open(path, "w", newline="\n") as handle:
        handle.write(text)


def _emit(text: str, out: str | None, quiet: bool) -> None:
    if out is not None:
        _write_text(out, text)
    if not quiet:
        sys.stdout.write(text)


def _sweep_row(report: RateReport) -> str:
    return ",".join(
        _fmt(value)
        for value in (
            report.L,
            report.eta_half,
            report.R_adaptive,
            report.R_original,
            report.G_adaptive,
            report.G_original,
            report.key_hz_adaptive,
            report.e_z,
            report.e_x,
            report.m_required,
            report.crossed_over,
        )
    )


def _safe_crossover(cfg: RunConfig) -> float | None:
    try:
        return crossover_distance(cfg.device, cfg.channel)
    except NoCrossoverError:
        return None


def cmd_rate(cfg: RunConfig, args: argparse.Namespace) -> int:
    report = rate_report(cfg.device, cfg.channel)
    crossover = _safe_crossover(cfg)
    lines = _provenance("rate", cfg)
    for name in (
        "L",
        "eta_half",
        "R_adaptive",
        "R_original",
        "G_adaptive",
        "G_original",
        "key_hz_adaptive",
        "e_z",
        "e_x",
        "m_required",
        "crossed_over",
    ):
        lines.append(f"{name}: {_fmt(getattr(report, name))}")
    lines.append(f"crossover_km: {_fmt(crossover) if crossover is not None else 'none'}")
    _emit("\n".join(lines) + "\n", args.out, args.quiet)
    return 0


def cmd_sweep(cfg: RunConfig, args: argparse.Namespace) -> int:
    reports = sweep_reports(cfg.device, cfg.channel, cfg.sweep.distances())
    lines = _provenance("sweep", cfg)
    lines.append(",".join(SWEEP_COLUMNS))
    lines.extend(_sweep_row(r) for r in reports)
    out = args.out or cfg.output.path or "sweep.csv"
    _write_text(out, "\n".join(lines) + "\n")
    if not args.no_plot:
        from .figures import save_sweep_figure

        save_sweep_figure(reports, _safe_crossover(cfg), Path(out).with_suffix(".png"))
    if not args.quiet:
        print(f"wrote {len(reports)} rows to {out}")
        if not args.no_plot:
            print(f"wrote figure to {Path(out).with_suffix('.png')}")
    return 0


def cmd_validate(cfg: RunConfig, args: argparse.Namespace) -> int:
    grid = DEFAULT_VALIDATION_GRID
    if cfg.mc.m_override is not None:
        grid = tuple((cfg.mc.m_override, p, q) for _, p, q in grid)
    results = validate_agreement(
        grid, trials=cfg.mc.trials, seed=cfg.mc.seed, workers=cfg.mc.workers
    )
    failures = sum(1 for r in results if abs(r.z) > 3.0)
    allowed = len(results) // 20
    passed = failures <= allowed
    lines = _provenance("validate", cfg)
    lines.append(f"# trials: {cfg.mc.trials} seed: {cfg.mc.seed} workers: {cfg.mc.workers}")
    if cfg.mc.trials < LOW_POWER_TRIALS:
        lines.append(f"# WARNING: low statistical power ({cfg.mc.trials} trials)")
    lines.append("m,p_herald,p_bm,analytic,mc_mean,mc_stderr,z_score")
    for r in results:
        lines.append(
            ",".join(
                _fmt(v) for v in (r.m, r.p_herald, r.p_bm, r.analytic, r.mc_mean, r.mc_stderr, r.z)
            )
        )
    verdict = "PASS" if passed else "FAIL"
    lines.append(
        f"RESULT: {verdict} ({failures} of {len(results)} points exceed |z| <= 3, allowed {allowed})"
    )
    if not passed:
        for r in results:
            if abs(r.z) > 3.0:
                lines.append(f"# offending point: m={r.m} p_herald={r.p_herald} p_bm={r.p_bm} z={r.z}")
    _emit("\n".join(lines) + "\n", args.out, args.quiet)
    return 0 if passed else 2


def cmd_gm_table(cfg: RunConfig, args: argparse.Namespace) -> int:
    rows = []
    for p in DEFICIT_TABLE_P:
        for m in DEFICIT_TABLE_M:
            g_exact = pairing_deficit_exact(m, p)
            g_approx = pairing_deficit_normal(m, p)
            rows.append(
                {
                    "m": m,
                    "p": p,
                    "g_exact": g_exact,
                    "g_approx": g_approx,
                    "rel_gap": (g_approx - g_exact) / g_exact,
                }
            )
    lines = _provenance("gm-table", cfg)
    lines.append("m,p,g_exact,g_approx,rel_gap")
    lines.extend(
        ",".join(_fmt(row[c]) for c in ("m", "p", "g_exact", "g_approx", "rel_gap"))
        for row in rows
    )
    out = args.out or cfg.output.path or "gm_table.csv"
    _write_text(out, "\n".join(lines) + "\n")
    if not args.no_plot:
        from .figures import save_deficit_figure

        save_deficit_figure(rows, Path(out).with_suffix(".png"))
    if not args.quiet:
        print(f"wrote {len(rows)} rows to {out}")
        if not args.no_plot:
            print(f"wrote figure to {Path(out).with_suffix('.png')}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="PATH", help="output file path")
    common.add_argument("--seed", type=int, help="Monte Carlo master seed")
    common.add_argument("--trials", type=int, help="Monte Carlo trials")
    common.add_argument("--workers", type=int, help="parallel Monte Carlo workers")
    common.add_argument("--L", type=float, help="distance in km")
    common.add_argument("--quiet", action="store_true", help="suppress stdout output")

    parser = argparse.ArgumentParser(
        prog="adaptive-mdiqkd",
        description="Rate analysis and Monte Carlo validation for mdiQKD with adaptive pairing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_rate = sub.add_parser("rate", parents=[common], help="evaluate one operating point")
    p_rate.set_defaults(func=cmd_rate)

    p_sweep = sub.add_parser("sweep", parents=[common], help="rate curves over distance, as CSV")
    p_sweep.add_argument("--no-plot", action="store_true", help="skip the figure next to the CSV")
    p_sweep.set_defaults(func=cmd_sweep)

    p_validate = sub.add_parser(
        "validate", parents=[common], help="Monte Carlo vs analytic agreement grid"
    )
    p_validate.set_defaults(func=cmd_validate)

    p_table = sub.add_parser(
        "gm-table", parents=[common], help="finite-multiplexing deficit table, as CSV"
    )
    p_table.add_argument("--no-plot", action="store_true", help="skip the figure next to the CSV")
    p_table.set_defaults(func=cmd_gm_table)
    return parser


def _apply_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    try:
        if args.L is not None:
            cfg = dataclasses.replace(
                cfg, channel=ChannelParams(L=args.L, l_att=cfg.channel.l_att, c=cfg.channel.c)
            )
        mc = cfg.mc
        if args.seed is not None:
            mc = dataclasses.replace(mc, seed=args.seed)
        if args.trials is not None:
            mc = dataclasses.replace(mc, trials=args.trials)
        if args.workers is not None:
            mc = dataclasses.replace(mc, workers=args.workers)
        if mc is not cfg.mc:
            cfg = dataclasses.replace(cfg, mc=mc)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
