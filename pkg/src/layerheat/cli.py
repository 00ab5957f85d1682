"""Command-line front end: ``layerheat solve|compare|example``.

Exit codes: 0 success, 1 unreadable or malformed configuration, 2 invalid
problem or settings, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .config import EXAMPLES, ConfigError, RunConfig, example_config, load_config
from .errors import LayerHeatError, NumericalFailure, UnknownExample
from .evaluate import SolutionField, _is_zero, output_grid, solve
from .oracles import crank_nicolson, fourier_reference, relative_error
from .problem import validate

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2, 3


def compute_field(cfg: RunConfig, method=None) -> SolutionField:
    """Field for ``method`` (default ``cfg.method``) on the configured grid."""
    method = method or cfg.method
    vp = validate(cfg.problem)
    x, layer = output_grid(vp, cfg.grid)
    if method == "utm":
        return solve(vp, x, cfg.times, cfg.contour_settings(), layer=layer, flux=cfg.flux)
    if method == "fd":
        return crank_nicolson(vp, cfg.cells_per_layer, cfg.dt, times=cfg.times, x=x, layer=layer)
    if method == "fourier":
        return fourier_reference(vp, x, cfg.times, cfg.terms)
    raise ValueError(f"unknown method {method!r}")


def endpoints_excluded(cfg: RunConfig):
    """Explicit setting, else exclude whenever either end has nonzero data."""
    if cfg.exclude_endpoints is not None:
        return bool(cfg.exclude_endpoints)
    vp = validate(cfg.problem)
    return not (_is_zero(vp.f_left) and _is_zero(vp.f_right))


def _fmt(v):
    return repr(float(v))


def format_field(field: SolutionField) -> str:
    lines = [f"# {k}={v!r}" for k, v in field.metadata.items()]
    has_flux = field.flux is not None
    lines.append("x,t,layer,u,flux" if has_flux else "x,t,layer,u")
    for k, t in enumerate(field.times):
        for i in range(len(field.x)):
            row = [_fmt(field.x[i]), _fmt(t), str(int(field.layer[i])), _fmt(field.values[k, i])]
            if has_flux:
                row.append(_fmt(field.flux[k, i]))
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def format_errors(reports, method, reference) -> str:
    lines = [f"# method={method!r}", f"# reference={reference!r}", "t,E,excluded_endpoints,N"]
    for r in reports:
        lines.append(f"{_fmt(r.t)},{_fmt(r.E)},{str(r.excluded_endpoints).lower()},{r.N}")
    return "\n".join(lines) + "\n"


def _write(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _errors_path(output):
    if output is None or output == "-":
        return None
    stem = output[:-4] if output.endswith(".csv") else output
    return stem + "_errors.csv"


def run_solve(cfg: RunConfig) -> int:
    cfg.check()
    field = compute_field(cfg)
    _write(format_field(field), cfg.output)
    return EXIT_OK


def run_compare(cfg: RunConfig, out=None):
    """Solve with ``cfg.method`` and ``cfg.compare_to``; returns ``(code, reports)``.

    The error table goes to ``out`` (standard output by default).
    """
    cfg.check()
    out = sys.stdout if out is None else out
    if cfg.compare_to is None:
        raise ValueError("compare needs compare_to (or --oracle)")
    field = compute_field(cfg)
    ref = compute_field(cfg, cfg.compare_to)
    excl = endpoints_excluded(cfg)
    reports = [relative_error(field, ref, t, excl) for t in cfg.times]
    table = format_errors(reports, cfg.method, cfg.compare_to)
    out.write(table)
    if cfg.output not in (None, "-"):
        _write(format_field(field), cfg.output)
        _write(table, _errors_path(cfg.output))
    return EXIT_OK, reports


def run_example(name, out=None, **overrides) -> int:
    cfg = example_config(name, **overrides)
    if cfg.output is None:
        cfg = replace(cfg, output=f"example_{name.upper()}.csv")
    if cfg.compare_to is not None:
        return run_compare(cfg, out)[0]
    return run_solve(cfg)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_PARSE)


def _times(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad time list {text!r}") from exc


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--times", type=_times, help="comma-separated output times")
    common.add_argument("--grid", type=int, help="number of grid points")
    common.add_argument("--output", help="data file (default: stdout for solve)")
    common.add_argument("--oracle", choices=("fd", "fourier"), help="reference method")
    common.add_argument("--theta-max", type=float, dest="theta_max")
    common.add_argument("--nodes", type=int, help="contour nodes per half")
    common.add_argument("--fixed-T", type=float, dest="fixed_T", help="single spectral horizon")
    common.add_argument("--threads", type=int, help="worker threads for the spectral solves")

    parser = _Parser(prog="layerheat", description="Heat conduction in layered slabs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("solve", parents=[common], help="solve a configured problem")
    p.add_argument("--config", required=True)
    p = sub.add_parser("compare", parents=[common], help="solve and compare with a reference")
    p.add_argument("--config", required=True)
    p = sub.add_parser("example", parents=[common], help="run a built-in example")
    p.add_argument("name", help="/".join(EXAMPLES))
    return parser


def _overrides(args):
    out = {}
    for key in ("times", "grid", "output", "theta_max", "nodes", "fixed_T", "threads"):
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    if args.oracle is not None:
        out["compare_to"] = args.oracle
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        over = _overrides(args)
        if args.command == "example":
            return run_example(args.name, **over)
        cfg = load_config(args.config)
        cfg = replace(cfg, **over) if over else cfg
        if args.command == "compare":
            return run_compare(cfg)[0]
        return run_solve(cfg)
    except ConfigError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_PARSE
    except NumericalFailure as exc:
        sys.stderr.write(f"numerical failure ({type(exc).__name__}): {exc}\n")
        return EXIT_NUMERICAL
    except UnknownExample as exc:
        sys.stderr.write(f"{exc.args[0]}\n")
        return EXIT_INVALID
    except (LayerHeatError, ValueError) as exc:
        sys.stderr.write(f"invalid problem ({type(exc).__name__}): {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
