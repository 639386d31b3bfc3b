from __future__ import annotations

import argparse
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from talbot import db
from talbot.config import RunConfig, parse_value
from talbot.content import (
    COMMAND_HELP,
    DESCRIPTION,
    EPILOG,
    FLAG_HELP,
    GLOBAL_HELP,
    HISTORY_EMPTY,
    SELFTEST_FAILED,
    SELFTEST_OK,
)
from talbot.output import atomic_write, rasterize_polar, write_csv, write_image, write_meta, write_raster
from talbot.physics import (
    ConfigError,
    ConfigurationError,
    EigenDecomposition,
    TruncationSpec,
    build_hamiltonian,
    build_position,
    carpet,
    coherent_state,
    converge_spectrum,
    detect_revival,
    diagonalize,
    dispersive_coefficients,
    fidelity_series,
    fractional_revival_times,
    mode_profiles,
    position_series,
    revival_windows,
    spectrum_sweep,
    talbot_length,
)
from talbot.runtime import Runtime
from talbot.selftest import run_selftest

log = logging.getLogger(__name__)

FRACTIONAL_ORDERS = (2, 3, 4)


@dataclass
class Command:
    name: str
    handler: Callable[[RunConfig, Runtime], int]
    flags: tuple[str, ...]
    help: str = ""


@dataclass
class Router:
    commands: dict[str, Command] = field(default_factory=dict)

    def command(self, name: str, *flags: str) -> Callable:
        def register(fn: Callable[[RunConfig, Runtime], int]) -> Callable[[RunConfig, Runtime], int]:
            self.commands[name] = Command(name=name, handler=fn, flags=flags, help=COMMAND_HELP.get(name, ""))
            return fn

        return register


router = Router()


def _flag_type(key: str) -> Callable[[str], object]:
    def convert(raw: str) -> object:
        try:
            return parse_value(key, raw)
        except ConfigError as e:
            raise argparse.ArgumentTypeError(str(e)) from e

    return convert


def _add_flag(parser: argparse.ArgumentParser, key: str) -> None:
    option = "--" + key.replace("_", "-")
    dest = "lam" if key == "lambda" else key
    if key in ("polar", "windows"):
        parser.add_argument(option, dest=dest, action="store_const", const=True, default=None, help=FLAG_HELP[key])
    else:
        parser.add_argument(option, dest=dest, type=_flag_type(key), default=None, help=FLAG_HELP[key])


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    """Общие флаги принимаются и до, и после подкоманды."""
    default = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=default, help=GLOBAL_HELP["config"])
    p.add_argument("--out", dest="out_dir", default=default, help=GLOBAL_HELP["out"])
    p.add_argument("--seed", type=_flag_type("seed"), default=default, help=GLOBAL_HELP["seed"])
    p.add_argument("--threads", type=_flag_type("threads"), default=default, help=GLOBAL_HELP["threads"])
    p.add_argument("--db", dest="db_path", default=default, help=GLOBAL_HELP["db"])
    p.add_argument("--verbose", "-v", action="store_true", default=default or False, help=GLOBAL_HELP["verbose"])
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="talbot",
        description=DESCRIPTION,
        epilog=EPILOG,
        parents=[_global_flags(suppress=False)],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    for cmd in router.commands.values():
        p = sub.add_parser(cmd.name, help=cmd.help, description=cmd.help, parents=[_global_flags(suppress=True)])
        for key in cmd.flags:
            _add_flag(p, key)
    return parser


def overrides_from_args(ns: argparse.Namespace) -> dict:
    skip = {"command", "config", "verbose"}
    return {k: v for k, v in vars(ns).items() if k not in skip and v is not None}


def _out(cfg: RunConfig, name: str) -> Path:
    return Path(cfg.out_dir) / name


def _state_k_max(cfg: RunConfig) -> int:
    """Уровни, которые должен покрыть базис: входной пучок и запрошенные моды."""
    mean = abs(cfg.alpha) ** 2
    need = int(math.ceil(mean + 10.0 * math.sqrt(mean) + 10.0))
    return max(cfg.levels - 1, max(cfg.modes, default=0), need, 1)


def decomposition(cfg: RunConfig, k_max: int) -> EigenDecomposition:
    """Фиксированный n_max или подбор по tol; подобранный размер запоминается в журнале."""
    if cfg.n_max:
        H = build_hamiltonian(TruncationSpec(cfg.n_max, cfg.guard), cfg.lam)
        return diagonalize(H, cfg.lam, guard=cfg.guard)

    cached = db.lookup_spectrum(cfg.lam, k_max, cfg.tol, cfg.guard)
    if cached:
        log.info("basis size from cache: lambda=%g n_max=%d", cfg.lam, cached["n_max"])
        H = build_hamiltonian(TruncationSpec(cached["n_max"], cfg.guard), cfg.lam)
        return diagonalize(H, cfg.lam, guard=cfg.guard)

    d = converge_spectrum(cfg.lam, k_max=k_max, tol=cfg.tol, guard=cfg.guard)
    db.cache_spectrum(cfg.lam, k_max, cfg.tol, cfg.guard, d.n_max, d.residual or 0.0, d.energies[: k_max + 1])
    return d


@router.command("spectrum", "lambda_min", "lambda_max", "lambda_points", "levels", "tol", "guard")
def cmd_spectrum(cfg: RunConfig, rt: Runtime) -> int:
    sweep = spectrum_sweep(cfg.lambda_grid(), cfg.levels, tol=cfg.tol, guard=cfg.guard, mapper=rt.map)
    write_csv(sweep.header(), sweep.rows(), _out(cfg, "spectrum.csv"))
    write_csv(["lambda", "n_max"], zip(sweep.lambda_grid.tolist(), sweep.n_max), _out(cfg, "spectrum_n_max.csv"))
    for lam, n, residual, energies in zip(sweep.lambda_grid.tolist(), sweep.n_max, sweep.residual, sweep.table):
        # тот же k_max, что и у развёртки
        db.cache_spectrum(lam, max(1, cfg.levels - 1), cfg.tol, cfg.guard, n, residual, energies.tolist())
    return 0


@router.command("modes", "lambda", "modes", "n_max", "tol", "guard", "x_extent", "x_points", "phase_points")
def cmd_modes(cfg: RunConfig, rt: Runtime) -> int:
    d = decomposition(cfg, max(max(cfg.modes), 1))
    prof = mode_profiles(d, cfg.modes, cfg.spatial_grid(), cfg.phase_grid())

    header = ["x"] + [f"phi_{k}" for k in prof.ks]
    rows = np.column_stack([prof.x, prof.spatial.T]).tolist()
    write_csv(header, rows, _out(cfg, "modes_spatial.csv"))

    header = ["theta"]
    columns = [prof.theta]
    for k, values in zip(prof.ks, prof.phase):
        header += [f"re_phi_{k}", f"im_phi_{k}"]
        columns += [values.real, values.imag]
    write_csv(header, np.column_stack(columns).tolist(), _out(cfg, "modes_phase.csv"))
    write_csv(["k", "E"], [[k, float(d.energies[k])] for k in prof.ks], _out(cfg, "modes_energies.csv"))
    return 0


@router.command(
    "propagate",
    "lambda",
    "alpha",
    "n_max",
    "tol",
    "guard",
    "t_max",
    "dt",
    "collapse_threshold",
    "revival_threshold",
)
def cmd_propagate(cfg: RunConfig, rt: Runtime) -> int:
    d = decomposition(cfg, _state_k_max(cfg))
    psi0 = coherent_state(cfg.alpha, d.n_max)
    x_op = build_position(TruncationSpec(d.n_max, cfg.guard))
    series = position_series(d, psi0, x_op, cfg.t_grid())
    write_csv(["t", "x_expect"], zip(series.t_grid.tolist(), series.values.tolist()), _out(cfg, "x_expect.csv"))

    report = detect_revival(
        series,
        dispersive_coefficients(cfg.lam),
        collapse_threshold=cfg.collapse_threshold,
        revival_threshold=cfg.revival_threshold,
    )
    text = report.to_text()
    write_meta(
        {"lambda": cfg.lam, "alpha": f"{cfg.alpha.real:g}{cfg.alpha.imag:+g}i", "n_max": d.n_max},
        _out(cfg, "x_expect.meta.txt"),
    )
    write_csv(report.header(), report.to_rows(), _out(cfg, "revivals.csv"))
    atomic_write(_out(cfg, "revival.txt"), text.encode("utf-8"))
    print(text, end="")
    return 0


def _carpet_files(cfg: RunConfig, rt: Runtime, d: EigenDecomposition, psi0, t: np.ndarray, stem: str) -> None:
    grid = cfg.spatial_grid() if cfg.domain == "spatial" else cfg.phase_grid()
    c = carpet(d, psi0, cfg.domain, grid, t, normalization=cfg.normalization, mapper=rt.map)
    ext = ".pgm" if cfg.colormap == "gray" else ".ppm"
    header = ["t"] + [f"{c.axis}={v:.17g}" for v in c.axis_points]
    write_csv(header, np.column_stack([c.t_grid, c.values]).tolist(), _out(cfg, stem + ".csv"))
    write_csv(["t", "row_integral"], zip(c.t_grid.tolist(), c.row_integrals.tolist()), _out(cfg, stem + "_norm.csv"))
    write_raster(c, _out(cfg, stem + ext), colormap=cfg.colormap)
    if cfg.polar:
        write_image(rasterize_polar(c, size=cfg.polar_size, colormap=cfg.colormap), _out(cfg, stem + "_polar" + ext))


@router.command(
    "carpet",
    "lambda",
    "alpha",
    "n_max",
    "tol",
    "guard",
    "domain",
    "t_max",
    "carpet_points",
    "dt",
    "x_extent",
    "x_points",
    "phase_points",
    "normalization",
    "colormap",
    "polar",
    "polar_size",
    "windows",
    "window_width",
)
def cmd_carpet(cfg: RunConfig, rt: Runtime) -> int:
    if cfg.polar and cfg.domain != "phase":
        raise ConfigurationError("--polar needs a phase carpet (--domain phase)")
    d = decomposition(cfg, _state_k_max(cfg))
    psi0 = coherent_state(cfg.alpha, d.n_max)
    _carpet_files(cfg, rt, d, psi0, cfg.carpet_t_grid(), f"carpet_{cfg.domain}")

    if cfg.windows:
        t_rev = talbot_length(dispersive_coefficients(cfg.lam).a2)
        for i, (start, stop) in enumerate(revival_windows(t_rev, cfg.window_width)):
            start = max(start, 0.0)
            _carpet_files(cfg, rt, d, psi0, cfg.carpet_t_grid(start, stop), f"carpet_{cfg.domain}_w{i}")
    return 0


@router.command("dispersive", "lambda", "alpha", "n_max", "tol", "guard", "t_max", "dt", "levels")
def cmd_dispersive(cfg: RunConfig, rt: Runtime) -> int:
    d = decomposition(cfg, _state_k_max(cfg))
    psi0 = coherent_state(cfg.alpha, d.n_max)
    coeffs = dispersive_coefficients(cfg.lam)
    t = cfg.t_grid()
    values = fidelity_series(d, psi0, coeffs, t)
    write_csv(["t", "fidelity"], zip(t.tolist(), values.tolist()), _out(cfg, "fidelity.csv"))

    k = np.arange(min(cfg.levels, d.dim))
    model = coeffs.energy(k)
    rows = [[int(i), float(d.energies[i]), float(m), float(d.energies[i] - m)] for i, m in zip(k, model)]
    write_csv(["k", "E_full", "E_model", "difference"], rows, _out(cfg, "dispersive_spectrum.csv"))
    meta = {
        "lambda": coeffs.lam,
        "a1": coeffs.a1,
        "a2": coeffs.a2,
        "constant_offset": coeffs.constant_offset,
        "talbot_length": talbot_length(coeffs.a2) if coeffs.a2 > 0 else math.inf,
        "n_max": d.n_max,
    }
    if coeffs.a2 > 0:
        # кошки Шрёдингера: T/2, T/3, 2T/3, T/4, 3T/4
        for q in FRACTIONAL_ORDERS:
            for p, denom, t_frac in fractional_revival_times(coeffs.a2, q):
                meta[f"fractional_{p}_{denom}"] = t_frac
    write_meta(meta, _out(cfg, "dispersive.meta.txt"))
    return 0


@router.command("selftest")
def cmd_selftest(cfg: RunConfig, rt: Runtime) -> int:
    results = run_selftest(seed=cfg.seed)
    for res in results:
        print(res.line())
    failed = sum(not r.passed for r in results)
    print(SELFTEST_OK if not failed else SELFTEST_FAILED.format(failed=failed, total=len(results)))
    return 1 if failed else 0


def _to_utc_dt(v) -> Optional[datetime]:
    """peewee отдаёт DateTimeField с часовым поясом из SQLite строкой."""
    if v is None:
        return None
    if isinstance(v, datetime):
        dt = v
    elif isinstance(v, str):
        try:
            dt = datetime.fromisoformat(v.strip().replace("Z", "+00:00"))
        except ValueError:
            return None
    else:
        return None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


@router.command("history")
def cmd_history(cfg: RunConfig, rt: Runtime) -> int:
    rows = db.get_run_rows(limit=10)
    if not rows:
        print(HISTORY_EMPTY)
        return 0
    for r in rows:
        dt = _to_utc_dt(r["created_at"])
        when = dt.strftime("%Y-%m-%d %H:%M:%S UTC") if dt else "?"
        print(f"#{r['id']} {when} {r['command']} [{r['status']}] -> {r['out_dir']}")
    return 0


def dispatch(command: str, cfg: RunConfig, rt: Runtime) -> int:
    cmd = router.commands[command]
    run_id = db.add_run(command, cfg.to_text(), cfg.out_dir) if command != "history" else None
    try:
        code = cmd.handler(cfg, rt)
    except Exception as e:
        db.finish_run(run_id, status="failed", message=str(e))
        raise
    db.finish_run(run_id, status="ok" if code == 0 else "failed")
    return code


__all__ = ["router", "build_parser", "overrides_from_args", "dispatch", "decomposition"]
