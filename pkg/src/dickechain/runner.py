"""Sweep orchestration and CSV output.

All data commands share one row schema (header below) so downstream
plotting never special-cases a file; the precision command, whose rows
are error pairs rather than traces, carries its own documented header.
Floats are serialized with 17 significant digits for lossless
round-trips, rows are written in deterministic input order by a single
writer, and per-point failures become rows with a populated error
column instead of aborting a long scan.
"""

from __future__ import annotations

import csv
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__, chain, dephasing, entanglement, selfcheck
from .errors import CapacityError, ConfigError, OutputError, SimulationError

CSV_HEADER = ["t", "E", "E_norm", "negativity", "p_q", "N", "M", "c",
              "gamma", "q_outcomes", "phi", "error"]
PRECISION_HEADER = ["t", "c", "E_window", "E_exact", "abs_err", "error"]


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int = 30
    m: int = 3
    c: float = 3.0
    c_t: float = 100.0
    t_max: float = math.pi
    phi: float = 0.0
    outcomes: tuple[int, ...] | None = None  # None means q_j = N everywhere
    gamma_grid: tuple[float, ...] = (0.0,)
    n_list: tuple[int, ...] = (3, 10, 20, 30)
    c_list: tuple[float, ...] = (1.0, 1.5, 2.0, 3.0)
    exact: bool = False
    workers: int = 1
    out: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.workers < 1:
            raise ConfigError(f"workers={self.workers} must be >= 1")


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, float):
        return f"{x:.16e}"
    return str(x)


def _write_csv(path: str, header: list[str], rows: list[dict]) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(row.get(col, "")) for col in header])
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def _write_meta(path: str, config: RunConfig, elapsed: float, rows: list[dict],
                extra: list[str] | None = None) -> None:
    failures = sum(1 for r in rows if r.get("error"))
    lines = [
        f"command: {config.command}",
        f"dickechain: {__version__}",
        f"python: {sys.version.split()[0]}",
        f"numpy: {np.__version__}",
    ]
    try:
        import scipy

        lines.append(f"scipy: {scipy.__version__}")
    except ImportError:
        pass
    for key in sorted(vars(config)):
        lines.append(f"config.{key}: {getattr(config, key)}")
    lines.append(f"rows: {len(rows)}")
    lines.append(f"failed_rows: {failures}")
    lines.append(f"elapsed_seconds: {elapsed:.3f}")
    if extra:
        lines.extend(extra)
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def _map_ordered(fn, items, workers: int):
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _outcomes(config: RunConfig) -> tuple[int, ...]:
    if config.outcomes is None:
        return (config.n,) * (config.m - 2)
    if len(config.outcomes) != config.m - 2:
        raise ConfigError(
            f"{len(config.outcomes)} outcomes given; M={config.m} needs {config.m - 2}"
        )
    return config.outcomes


def _base_row(config: RunConfig, t: float, gamma: float) -> dict:
    return {
        "t": t,
        "N": config.n,
        "M": config.m,
        "c": config.c,
        "gamma": gamma,
        "q_outcomes": ";".join(str(q) for q in _outcomes(config)),
        "phi": config.phi,
        "error": "",
    }


def _pure_point(config: RunConfig, t: float) -> dict:
    """One trace row: amplitudes, Schmidt entropy, pure-state negativity."""
    row = _base_row(config, t, 0.0)
    try:
        cfg = chain.chain_config(
            N=config.n, M=config.m, t=t, outcomes=_outcomes(config),
            c=config.c, phi=config.phi, c_t=config.c_t,
        )
        if config.exact:
            A = chain.project_intermediates(chain.exact_evolve(cfg), cfg.outcomes, cfg.phi)
        elif config.m == 3:
            A = chain.phase_reduced_core(cfg)
        else:
            A = chain.closed_form_amplitudes(cfg)
        rep = entanglement.schmidt_entropy(A)
        row.update(E=rep.E, E_norm=rep.E_norm, negativity=rep.negativity, p_q=rep.p_q)
    except SimulationError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_trace(config: RunConfig) -> list[dict]:
    start = time.monotonic()
    if config.exact:
        dim = (config.n + 1) ** config.m
        if dim > chain.EXACT_AMPLITUDE_CAP:
            # t-independent, so fail the run instead of every row
            raise CapacityError(
                f"exact path needs {dim} amplitudes, cap is {chain.EXACT_AMPLITUDE_CAP}"
            )
    grid = chain.time_grid(config.n, config.c_t, config.t_max)
    rows = _map_ordered(lambda t: _pure_point(config, float(t)), grid, config.workers)
    if config.out:
        _write_csv(config.out, CSV_HEADER, rows)
        _write_meta(config.out + ".meta.txt", config, time.monotonic() - start, rows)
    return rows


def _entropy_at(config: RunConfig, t: float, c: float) -> float:
    cfg = chain.chain_config(
        N=config.n, M=config.m, t=t, outcomes=_outcomes(config),
        c=c, phi=config.phi, c_t=config.c_t,
    )
    A = chain.phase_reduced_core(cfg) if config.m == 3 else chain.closed_form_amplitudes(cfg)
    return entanglement.schmidt_entropy(A, with_negativity=False).E


def run_precision(config: RunConfig) -> tuple[list[dict], dict]:
    """Windowed-vs-full-basis entropy error over the grid and at the four
    magic times, for each c in c_list.  The full basis (c = inf) is exact
    here, so it serves as the reference."""
    start = time.monotonic()
    grid = list(map(float, chain.time_grid(config.n, config.c_t, config.t_max)))
    times = grid + [t for t in dephasing.MAGIC_TIMES if t <= config.t_max]
    magic = set(dephasing.MAGIC_TIMES)

    ref = _map_ordered(
        lambda t: _entropy_at(config, t, math.inf), times, config.workers
    )
    rows: list[dict] = []
    summary: dict = {}
    for c in config.c_list:
        def point(args):
            t, E_exact = args
            row = {"t": t, "c": c, "E_exact": E_exact, "error": ""}
            try:
                E_win = _entropy_at(config, t, c)
                row.update(E_window=E_win, abs_err=abs(E_win - E_exact))
            except SimulationError as exc:
                row["error"] = f"{type(exc).__name__}: {exc}"
            return row

        crows = _map_ordered(point, list(zip(times, ref)), config.workers)
        rows.extend(crows)
        ok = [r for r in crows if not r["error"]]
        summary[c] = {
            "max_err_grid": max((r["abs_err"] for r in ok if r["t"] not in magic), default=math.nan),
            "max_err_magic": max((r["abs_err"] for r in ok if r["t"] in magic), default=math.nan),
        }
    if config.out:
        extra = [
            f"summary.c={c}: max_err_grid={s['max_err_grid']:.6e} "
            f"max_err_magic={s['max_err_magic']:.6e}"
            for c, s in summary.items()
        ]
        _write_csv(config.out, PRECISION_HEADER, rows)
        _write_meta(config.out + ".meta.txt", config, time.monotonic() - start, rows, extra)
    return rows, summary


def _dephased_point(config: RunConfig, t: float, gamma: float) -> dict:
    row = _base_row(config, t, gamma)
    try:
        cfg = chain.chain_config(
            N=config.n, M=config.m, t=t, outcomes=_outcomes(config),
            c=config.c, phi=config.phi, c_t=config.c_t,
        )
        _, p_q, rep = dephasing.dephased_end_to_end(
            cfg, dephasing.DephasingParams(gamma=gamma, t=t)
        )
        row.update(E=rep.E, E_norm=rep.E_norm, negativity=rep.negativity, p_q=p_q)
    except SimulationError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_gamma_sweep(config: RunConfig) -> list[dict]:
    start = time.monotonic()
    grid = chain.time_grid(config.n, config.c_t, config.t_max)
    work = [(float(t), g) for g in config.gamma_grid for t in grid]
    rows = _map_ordered(
        lambda tg: _dephased_point(config, tg[0], tg[1]), work, config.workers
    )
    if config.out:
        _write_csv(config.out, CSV_HEADER, rows)
        _write_meta(config.out + ".meta.txt", config, time.monotonic() - start, rows)
    return rows


def run_magic(config: RunConfig) -> list[dict]:
    start = time.monotonic()
    cells = dephasing.magic_time_scan(
        config.n_list, config.gamma_grid, times=dephasing.MAGIC_TIMES,
        c=config.c, phi=config.phi,
    )
    rows = []
    for cell in cells:
        row = {
            "t": cell["t"], "E": cell["E"],
            "E_norm": (None if cell["E"] is None else cell["E"] / math.log2(cell["N"] + 1)),
            "negativity": cell["negativity"], "p_q": cell["p_q"],
            "N": cell["N"], "M": 3, "c": config.c, "gamma": cell["gamma"],
            "q_outcomes": str(cell["N"]), "phi": config.phi, "error": cell["error"],
        }
        rows.append(row)
    if config.out:
        _write_csv(config.out, CSV_HEADER, rows)
        _write_meta(config.out + ".meta.txt", config, time.monotonic() - start, rows)
    return rows


def selftest(config: RunConfig | None = None, stream=None) -> int:
    stream = stream or sys.stdout
    results = selfcheck.run_all()
    for r in results:
        tag = "ok  " if r.passed else "FAIL"
        print(f"{tag} {r.name}: {r.detail}", file=stream)
    failed = [r for r in results if not r.passed]
    print(
        f"{len(results) - len(failed)}/{len(results)} checks passed",
        file=stream,
    )
    return 0 if not failed else 1
