"""Конфигурация запуска: значения по умолчанию -> переменные окружения -> файл `key = value` -> флаги CLI."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields, replace
from typing import Any, Callable, Mapping, Optional

import numpy as np

from talbot.physics._common import ConfigError, DomainError, check_lambda
from talbot.physics.projections import PhaseGrid, SpatialGrid

NORMALIZATIONS = ("frame", "global", "none")
DOMAINS = ("spatial", "phase")
COLORMAPS = ("gray", "viridis")


def _env(name: str, default: str = "") -> str:
    return (os.getenv(name, default) or "").strip()


def parse_complex(raw: str) -> complex:
    """'0+4i', '4i', '-1.5-2i', '3' (допускается и j)."""
    s = raw.strip().replace(" ", "").replace("I", "i").replace("i", "j")
    if s in ("j", "+j", "-j"):
        s = s.replace("j", "1j")
    value = complex(s)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"non-finite complex value {raw!r}")
    return value


def parse_bool(raw: str) -> bool:
    s = raw.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def parse_float(raw: str) -> float:
    value = float(raw)
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {raw!r}")
    return value


def parse_int_list(raw: str) -> tuple[int, ...]:
    items = [p.strip() for p in raw.split(",") if p.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(int(p) for p in items)


@dataclass(frozen=True)
class RunConfig:
    lam: float = 0.01
    alpha: complex = 4j
    # 0 -> размер базиса подбирается converge_spectrum по tol
    n_max: int = 128
    tol: float = 1e-9
    guard: int = 8
    x_extent: float = 12.0
    x_points: int = 512
    phase_points: int = 512
    t_max: float = 600.0
    dt: float = 0.05
    out_dir: str = "out"
    normalization: str = "frame"
    collapse_threshold: float = 0.1
    revival_threshold: float = 0.5
    levels: int = 12
    lambda_min: float = 0.0
    lambda_max: float = 0.5
    lambda_points: int = 51
    modes: tuple[int, ...] = (0, 1, 2, 3)
    domain: str = "spatial"
    colormap: str = "gray"
    polar: bool = False
    polar_size: int = 1024
    # число строк ковра на [0, t_max]; 0 -> строки через dt
    carpet_points: int = 1200
    windows: bool = False
    window_width: float = 25.0
    threads: int = 1
    seed: int = 0
    db_path: str = "talbot.db"

    def validate(self) -> "RunConfig":
        for key, check in _CHECKS.items():
            message = check(getattr(self, KEY_TO_ATTR.get(key, key)))
            if message:
                raise ConfigError(message, key=key)
        if self.lambda_max < self.lambda_min:
            raise ConfigError(f"lambda_max {self.lambda_max} < lambda_min {self.lambda_min}", key="lambda_max")
        if self.n_max and self.phase_points < 2 * self.n_max:
            raise ConfigError(
                f"aliasing: phase_points {self.phase_points} < 2·n_max {2 * self.n_max}", key="phase_points"
            )
        if self.dt > self.t_max:
            raise ConfigError(f"dt {self.dt} exceeds t_max {self.t_max}", key="dt")
        return self

    def t_grid(self) -> np.ndarray:
        count = int(round(self.t_max / self.dt))
        return self.dt * np.arange(count + 1, dtype=np.float64)

    def carpet_t_grid(self, start: float = 0.0, stop: Optional[float] = None) -> np.ndarray:
        stop = self.t_max if stop is None else stop
        if self.carpet_points == 0:
            count = int(round((float(stop) - float(start)) / self.dt))
            return float(start) + self.dt * np.arange(count + 1, dtype=np.float64)
        return np.linspace(float(start), float(stop), self.carpet_points)

    def lambda_grid(self) -> np.ndarray:
        if self.lambda_points == 1:
            return np.array([self.lambda_min])
        return np.linspace(self.lambda_min, self.lambda_max, self.lambda_points)

    def spatial_grid(self) -> SpatialGrid:
        return SpatialGrid.uniform(self.x_extent, self.x_points)

    def phase_grid(self) -> PhaseGrid:
        return PhaseGrid(self.phase_points)

    def to_text(self) -> str:
        lines = []
        for key, attr in KEY_TO_ATTR.items():
            value = getattr(self, attr)
            lines.append(f"{key} = {_render(value)}")
        return "\n".join(lines) + "\n"


def _render(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}i"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


def _lambda_message(value: float) -> Optional[str]:
    try:
        check_lambda(value)
    except DomainError as e:
        return str(e)
    return None


def _positive(value) -> Optional[str]:
    return None if value > 0 else f"must be positive, got {value}"


def _non_negative(value) -> Optional[str]:
    return None if value >= 0 else f"must be non-negative, got {value}"


def _one_of(options: tuple[str, ...]) -> Callable[[str], Optional[str]]:
    def check(value: str) -> Optional[str]:
        return None if value in options else f"must be one of {', '.join(options)}, got {value!r}"

    return check


def _n_max(value: int) -> Optional[str]:
    return None if value == 0 or value >= 8 else f"must be 0 (auto) or >= 8, got {value}"


def _threshold(value: float) -> Optional[str]:
    return None if 0 < value < 1.5 else f"must be in (0, 1.5), got {value}"


def _modes(value: tuple[int, ...]) -> Optional[str]:
    return None if all(k >= 0 for k in value) else f"mode indices must be non-negative, got {value}"


# ключ в файле -> атрибут RunConfig
KEY_TO_ATTR: dict[str, str] = {("lambda" if f.name == "lam" else f.name): f.name for f in fields(RunConfig)}

_PARSERS: dict[str, Callable[[str], Any]] = {
    "lambda": parse_float,
    "alpha": parse_complex,
    "n_max": int,
    "tol": parse_float,
    "guard": int,
    "x_extent": parse_float,
    "x_points": int,
    "phase_points": int,
    "t_max": parse_float,
    "dt": parse_float,
    "out_dir": str,
    "normalization": str,
    "collapse_threshold": parse_float,
    "revival_threshold": parse_float,
    "levels": int,
    "lambda_min": parse_float,
    "lambda_max": parse_float,
    "lambda_points": int,
    "modes": parse_int_list,
    "domain": str,
    "colormap": str,
    "polar": parse_bool,
    "polar_size": int,
    "carpet_points": int,
    "windows": parse_bool,
    "window_width": parse_float,
    "threads": int,
    "seed": int,
    "db_path": str,
}

_CHECKS: dict[str, Callable[[Any], Optional[str]]] = {
    "lambda": _lambda_message,
    "lambda_min": _lambda_message,
    "lambda_max": _lambda_message,
    "n_max": _n_max,
    "tol": _positive,
    "guard": lambda v: None if v >= 4 else f"must be >= 4, got {v}",
    "x_extent": _positive,
    "x_points": lambda v: None if v >= 2 else f"must be >= 2, got {v}",
    "phase_points": lambda v: None if v >= 2 else f"must be >= 2, got {v}",
    "t_max": _positive,
    "dt": _positive,
    "normalization": _one_of(NORMALIZATIONS),
    "collapse_threshold": _threshold,
    "revival_threshold": _threshold,
    "levels": _positive,
    "lambda_points": _positive,
    "modes": _modes,
    "domain": _one_of(DOMAINS),
    "colormap": _one_of(COLORMAPS),
    "polar_size": lambda v: None if v >= 2 else f"must be >= 2, got {v}",
    "carpet_points": lambda v: None if v == 0 or v >= 2 else f"must be 0 or >= 2, got {v}",
    "window_width": _positive,
    "threads": _positive,
    "seed": _non_negative,
}


def parse_value(key: str, raw: str, line: Optional[int] = None) -> Any:
    if key not in _PARSERS:
        raise ConfigError("unknown key", line=line, key=key)
    try:
        value = _PARSERS[key](raw.strip())
    except ValueError as e:
        raise ConfigError(f"cannot parse value {raw.strip()!r}: {e}", line=line, key=key) from e
    check = _CHECKS.get(key)
    message = check(value) if check else None
    if message:
        raise ConfigError(message, line=line, key=key)
    return value


def parse_config(text: str, base: Optional[RunConfig] = None) -> RunConfig:
    """Плоский формат `key = value`, одна пара на строку, `#` начинает комментарий."""
    values: dict[str, Any] = {}
    for lineno, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key, raw = line.split("=", 1)
        key = key.strip()
        values[KEY_TO_ATTR.get(key, key)] = parse_value(key, raw, line=lineno)
    return replace(base or RunConfig(), **values).validate()


def env_overrides(environ: Optional[Mapping[str, str]] = None) -> dict[str, Any]:
    """TALBOT_OUT_DIR, TALBOT_THREADS, TALBOT_DB_PATH."""
    get = (lambda name: (environ.get(name, "") or "").strip()) if environ is not None else _env
    out: dict[str, Any] = {}
    for name, key in (("TALBOT_OUT_DIR", "out_dir"), ("TALBOT_THREADS", "threads"), ("TALBOT_DB_PATH", "db_path")):
        raw = get(name)
        if raw:
            try:
                out[key] = parse_value(key, raw)
            except ConfigError as e:
                raise ConfigError(f"{name}: {e}", key=key) from e
    return out


def load_config(
    config_text: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    base = replace(RunConfig(), **env_overrides(environ))
    cfg = parse_config(config_text, base=base) if config_text else base
    if overrides:
        attrs = {KEY_TO_ATTR.get(k, k): v for k, v in overrides.items() if v is not None}
        for key in attrs:
            if key not in KEY_TO_ATTR.values():
                raise ConfigError("unknown key", key=key)
        cfg = replace(cfg, **attrs)
    return cfg.validate()
