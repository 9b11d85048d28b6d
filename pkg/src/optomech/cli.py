"""Command-line entry point: ``optomech <command> --config cfg.json``.

Exit codes: 0 success, 1 config error, 2 computation failure (for sweeps,
any failed point; partial results are still written).
"""

import argparse
import sys
from pathlib import Path

from . import experiments as ex
from .errors import ConfigError, OptomechError


def _emit(text, args, config):
    # --output, then the config's output.path, then <config stem>-<command>.csv
    path = args.output or config.output.get("path") or f"{Path(args.config).stem}-{args.command}.csv"
    if path == "-":
        sys.stdout.write(text)
        return
    ex.write_output(text, path, config, sidecar=bool(config.output.get("json_sidecar", False)))
    print(f"wrote {path}", file=sys.stderr)


def cmd_trace(args, config):
    record = ex.run_time_trace(config)
    _emit(ex.trace_csv(config, record), args, config)
    return 0


def _sweep(args, config, fn, command):
    result = fn(config)
    _emit(ex.sweep_csv(command, config, result), args, config)
    for i, msg in sorted(result.errors.items()):
        print(f"point {i} ({result.variable}={result.axis[i]!r}) failed: {msg}", file=sys.stderr)
    return 2 if result.errors else 0


def cmd_sweep_omega(args, config):
    return _sweep(args, config, ex.sweep_modulation_frequency, "sweep-omega")


def cmd_sweep_amplitude(args, config):
    return _sweep(args, config, ex.sweep_modulation_amplitude, "sweep-amplitude")


def cmd_limit_cycle(args, config):
    cols, residual, error = ex.limit_cycle_table(config)
    names = list(cols)
    text = ex.format_csv(
        "limit-cycle",
        config,
        names,
        zip(*(cols[k] for k in names)),
        [f"residual: {residual!r}", f"analytic_vs_numerical_max_rel_error: {error!r}"],
    )
    _emit(text, args, config)
    return 0


def cmd_stability(args, config):
    rows = ex.stability_scan(config)
    variable = config.sweep.variable if config.sweep else "none"
    text = ex.format_csv(
        "stability",
        config,
        ["variable", "value", "spectral_radius", "margin", "stable"],
        [(variable, v, rho, margin, stable) for v, rho, margin, stable, _ in rows],
    )
    _emit(text, args, config)
    failed = [r for r in rows if r[4]]
    for r in failed:
        print(f"{variable}={r[0]!r} failed: {r[4]}", file=sys.stderr)
    return 2 if failed else 0


COMMANDS = {
    "trace": (cmd_trace, "E_N(t): transient plus one steady-state period"),
    "sweep-omega": (cmd_sweep_omega, "maximal E_N versus modulation frequency"),
    "sweep-amplitude": (cmd_sweep_amplitude, "maximal E_N versus modulation amplitude"),
    "limit-cycle": (cmd_limit_cycle, "numerical and analytic limit cycle over one period"),
    "stability": (cmd_stability, "spectral radius of the monodromy matrix"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="optomech", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument(
            "--set", action="append", default=[], metavar="KEY=VALUE",
            help="override a config entry by dotted path, e.g. coupling.g0=0.4",
        )
        p.add_argument("--output", help="output CSV path ('-' for stdout)")
        p.add_argument("--workers", type=int, help="parallel worker processes for sweeps")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = list(args.set)
    if args.workers is not None:
        overrides.append(f"numerics.workers={args.workers}")
    try:
        config = ex.load_config(args.config, overrides)
        handler = COMMANDS[args.command][0]
        return handler(args, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OptomechError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
