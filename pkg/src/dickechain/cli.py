"""Command-line front end.

Subcommands: trace, precision, gamma-sweep, magic, selftest.  Flags can
also come from a flat key=value config file (--config); explicit flags
win.  Exit codes: 0 success, 1 config error, 2 capacity error,
3 numerical-validity error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys

from .errors import ConfigError, OutputError, SimulationError
from .runner import (
    RunConfig,
    run_gamma_sweep,
    run_magic,
    run_precision,
    run_trace,
    selftest,
)

DEFAULT_OUT = {
    "trace": "trace.csv",
    "precision": "precision.csv",
    "gamma-sweep": "gamma_sweep.csv",
    "magic": "magic.csv",
}


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage, which collides with the
    # capacity exit code; route usage problems through ConfigError instead
    def error(self, message):
        raise ConfigError(message)


def _float(text: str) -> float:
    if text.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    return float(text)


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(_float(p) for p in text.split(",") if p.strip())


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in text.split(",") if p.strip())


def _outcomes(text: str) -> str:
    return text.strip()


_FLAGS = {
    # dest: (flag, parser, help)
    "n": ("--n", int, "atoms per node"),
    "m": ("--m", int, "number of nodes"),
    "c": ("--c", _float, "truncation constant (inf for the full basis)"),
    "c_t": ("--ct", _float, "time-grid constant; spacing pi/(ct*N)"),
    "t_max": ("--tmax", _float, "end of the time grid (radians)"),
    "phi": ("--phi", _float, "equatorial offset before measurement"),
    "outcomes": ("--outcomes", _outcomes,
                 "intermediate outcomes: comma list (e.g. 3,2) or all-N"),
    "gamma_grid": ("--gamma-grid", _float_list, "comma list of dephasing rates"),
    "n_list": ("--n-list", _int_list, "comma list of N for magic scans"),
    "c_list": ("--c-list", _float_list, "comma list of c for precision scans"),
    "workers": ("--workers", int, "worker threads"),
    "out": ("--out", str, "output CSV path"),
    "seed": ("--seed", int, "seed for sampled checks"),
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="dickechain", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("trace", "precision", "gamma-sweep", "magic", "selftest"):
        p = sub.add_parser(name)
        for dest, (flag, typ, help_) in _FLAGS.items():
            p.add_argument(flag, dest=dest, type=typ, default=None, help=help_)
        p.add_argument("--exact", action="store_true", default=None,
                       help="use the full-basis evolution when it fits in memory")
        p.add_argument("--config", dest="config_file", default=None,
                       help="flat key=value file; flags override it")
    return parser


def _read_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    known = {flag.lstrip("-"): (dest, typ) for dest, (flag, typ, _) in _FLAGS.items()}
    known["exact"] = ("exact", lambda s: s.strip().lower() in ("1", "true", "yes"))
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        dest, typ = known[key]
        try:
            out[dest] = typ(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return out


def _parse_outcomes(text: str | None, n: int) -> tuple[int, ...] | None:
    if text is None or text == "all-N":
        return None
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"bad --outcomes {text!r}: {exc}") from exc


def build_run_config(argv: list[str]) -> RunConfig:
    args = _build_parser().parse_args(argv)
    merged: dict = {}
    if args.config_file:
        merged.update(_read_config_file(args.config_file))
    for dest in list(_FLAGS) + ["exact"]:
        value = getattr(args, dest)
        if value is not None:
            merged[dest] = value
    defaults = RunConfig(command=args.command)
    n = merged.get("n", defaults.n)
    merged["outcomes"] = _parse_outcomes(merged.get("outcomes"), n)
    if args.command != "selftest" and "out" not in merged:
        merged["out"] = DEFAULT_OUT[args.command]
    try:
        return RunConfig(command=args.command, **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = build_run_config(argv)
        if config.command == "trace":
            rows = run_trace(config)
        elif config.command == "precision":
            rows, summary = run_precision(config)
            for c, s in summary.items():
                print(f"c={c}: max_err_grid={s['max_err_grid']:.6e} "
                      f"max_err_magic={s['max_err_magic']:.6e}")
        elif config.command == "gamma-sweep":
            rows = run_gamma_sweep(config)
        elif config.command == "magic":
            rows = run_magic(config)
        else:
            return selftest(config)
        failed = sum(1 for r in rows if r.get("error"))
        print(f"{config.command}: {len(rows)} rows -> {config.out}"
              + (f" ({failed} failed points)" if failed else ""))
        return 0
    except SystemExit:
        raise
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return OutputError.exit_code
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
