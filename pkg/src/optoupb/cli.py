"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 solver non-convergence on
``solve``, 3 cutoff cap reached.
"""

from __future__ import annotations

import argparse
import configparser
import io
import logging
import sys

from .errors import ConfigError, NonConvergenceError, ResourceLimitError
from .sweep import (FIGURES, SCALES, LoadedConfig, SweepConfig, SweepResult, figure_preset,
                    minimize_g2_over_g, parse_config, point_params, run_sweep,
                    solve_point, sweep_metadata, write_result)

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGENCE, EXIT_RESOURCE = 0, 1, 2, 3


def _common(p):
    p.add_argument("--config", help="INI-style configuration file")
    p.add_argument("--out", help="write the table here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, help="parallel grid workers")
    p.add_argument("--scale", choices=SCALES, default="desk")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a [params] entry; may be repeated")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optoupb", description="Photon antibunching in coupled optomechanical cavities.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("solve", "steady state at a single parameter point"),
                       ("sweep", "grid sweep defined in the configuration"),
                       ("minimize", "minimize g2(0) over the optomechanical coupling g"),
                       ("weakpump", "analytic weak-pump g2(0), single point or grid")):
        _common(sub.add_parser(name, help=text))
    fig = sub.add_parser("figure", help="reproduce the data behind a figure")
    fig.add_argument("figure_id", choices=FIGURES)
    _common(fig)
    return parser


def _load(args) -> LoadedConfig:
    text = ""
    source = "<defaults>"
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        source = args.config
    if args.set:
        text = _with_overrides(text, args.set)
    loaded = parse_config(text, source)
    if args.workers is not None:
        loaded = LoadedConfig(loaded.sweep.replace(workers=args.workers),
                              loaded.g_range, loaded.grid_n)
    return loaded


def _with_overrides(text: str, items) -> str:
    """Apply ``--set KEY=VALUE`` entries to the ``[params]`` section."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    if not cp.has_section("params"):
        cp.add_section("params")
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        cp["params"][key.strip()] = value.strip()
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def _emit(result: SweepResult, args):
    text = write_result(result, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)


def _capped(result: SweepResult) -> bool:
    return any(str(r.get("error", "")).startswith("ResourceLimitError") for r in result.rows)


def _single(cfg: SweepConfig) -> SweepConfig:
    if cfg.axes:
        raise ConfigError("this command takes a single point; remove the [axes] section")
    return cfg


def cmd_solve(args) -> int:
    cfg = _single(_load(args).sweep)
    p = point_params(cfg, ())
    row = solve_point(cfg, ())
    err = row["error"]
    if err.startswith("NonConvergenceError"):
        print(err, file=sys.stderr)
        return EXIT_NONCONVERGENCE
    if err.startswith("ResourceLimitError"):
        print(err, file=sys.stderr)
        return EXIT_RESOURCE
    if err:
        print(err, file=sys.stderr)
        return EXIT_CONFIG
    params = {"delta1_over_kappa": p.delta1, "delta2_over_kappa": p.delta2}
    row = {**params, **row}
    columns = tuple(params) + tuple(c for c in row if c not in params)
    _emit(SweepResult(columns, [row], sweep_metadata(cfg)), args)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args).sweep
    if not cfg.axes:
        raise ConfigError("sweep needs an [axes] section")
    result = run_sweep(cfg)
    _emit(result, args)
    return EXIT_RESOURCE if _capped(result) else EXIT_OK


def cmd_minimize(args) -> int:
    loaded = _load(args)
    cfg = _single(loaded.sweep)
    params = cfg.base
    if cfg.k_b_t is not None:
        params = point_params(cfg.replace(derived_detuning=False), ())
    res = minimize_g2_over_g(params, loaded.g_range, loaded.grid_n, cutoffs=cfg.cutoffs,
                             opts=cfg.solver, rel_tol=cfg.rel_tol,
                             derived_detuning=cfg.derived_detuning, caps=cfg.caps)
    row = {"J_over_kappa": params.coupling_j, "omega_m_over_kappa": params.omega_m,
           "g_min_over_kappa": res.g_min, "g2_min": res.g2_min,
           "multimodal": res.multimodal, "N_ph": res.cutoffs[0], "N_m": res.cutoffs[1]}
    _emit(SweepResult(tuple(row), [row], sweep_metadata(cfg, grid=list(res.grid))), args)
    return EXIT_OK


def cmd_weakpump(args) -> int:
    cfg = _load(args).sweep.replace(model="weak-pump", outputs=("g2",))
    result = run_sweep(cfg)
    _emit(result, args)
    return EXIT_CONFIG if result.failures else EXIT_OK


def cmd_figure(args) -> int:
    result = figure_preset(args.figure_id, args.scale, workers=args.workers or 1)
    _emit(result, args)
    return EXIT_RESOURCE if _capped(result) else EXIT_OK


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "minimize": cmd_minimize,
            "weakpump": cmd_weakpump, "figure": cmd_figure}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergenceError as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except ResourceLimitError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
