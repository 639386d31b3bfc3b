"""Растры ковров: PGM P5 (16 бит, big-endian) и PPM P6 (8 бит) с зашитой палитрой."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from talbot.physics._common import ConfigurationError
from talbot.physics.propagation import Carpet

from .csv_io import PathLike, atomic_write, write_meta

COLORMAPS = ("gray", "viridis")
DEFAULT_POLAR_SIZE = 1024
_DATA = Path(__file__).resolve().parent / "data"


@dataclass(frozen=True, eq=False)
class RasterImage:
    width: int
    height: int
    depth: int  # 16 для gray, 8 для rgb
    pixels: np.ndarray  # (h, w) uint16 или (h, w, 3) uint8; верхняя строка соответствует самому раннему t
    meta: dict = field(default_factory=dict)

    @property
    def mode(self) -> str:
        return "rgb" if self.pixels.ndim == 3 else "gray"


@lru_cache(maxsize=None)
def load_colormap(name: str) -> np.ndarray:
    if name != "viridis":
        raise ConfigurationError(f"unknown colormap {name!r}; available: {', '.join(COLORMAPS)}")
    table = np.loadtxt(_DATA / "viridis256.txt", comments="#", dtype=np.int64)
    if table.shape != (256, 3):
        raise ConfigurationError(f"colormap table must be 256x3, got {table.shape}")
    table = table.astype(np.uint8)
    table.setflags(write=False)
    return table


def unit_scale(values: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Линейно в [0, 1] по min/max; нулевой диапазон даёт нули."""
    lo = float(np.min(values))
    hi = float(np.max(values))
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigurationError("carpet contains non-finite values")
    if hi <= lo:
        return np.zeros(values.shape), lo, hi
    return (values - lo) / (hi - lo), lo, hi


def _pixels(unit: np.ndarray, colormap: str, mask: np.ndarray | None = None) -> np.ndarray:
    if colormap == "gray":
        px = np.rint(unit * 65535.0).astype(np.uint16)
        if mask is not None:
            px[~mask] = 0
        return px
    table = load_colormap(colormap)
    px = table[np.rint(unit * 255.0).astype(np.int64)]
    if mask is not None:
        px[~mask] = 0
    return px


def to_image(values: np.ndarray, colormap: str = "gray", meta: dict | None = None) -> RasterImage:
    if colormap not in COLORMAPS:
        raise ConfigurationError(f"unknown colormap {colormap!r}; available: {', '.join(COLORMAPS)}")
    values = np.asarray(values, dtype=np.float64)
    unit, lo, hi = unit_scale(values)
    px = _pixels(unit, colormap)
    info = {"value_min": lo, "value_max": hi, "mapping": "linear", "colormap": colormap, **(meta or {})}
    return RasterImage(
        width=values.shape[1], height=values.shape[0], depth=16 if colormap == "gray" else 8, pixels=px, meta=info
    )


def encode_image(image: RasterImage) -> bytes:
    if image.mode == "gray":
        header = f"P5\n{image.width} {image.height}\n65535\n".encode("ascii")
        return header + image.pixels.astype(">u2").tobytes()
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(image.pixels, dtype=np.uint8).tobytes()


def write_image(image: RasterImage, path: PathLike) -> Path:
    path = Path(path)
    out = atomic_write(path, encode_image(image))
    write_meta(
        {"width": image.width, "height": image.height, "depth": image.depth, **image.meta},
        path.with_name(path.name + ".meta.txt"),
    )
    return out


def _carpet_meta(carpet: Carpet) -> dict:
    return {
        "axis": carpet.axis,
        "axis_min": float(carpet.axis_points[0]),
        "axis_max": float(carpet.axis_points[-1]),
        "axis_points": int(carpet.axis_points.size),
        "t_min": float(carpet.t_grid[0]),
        "t_max": float(carpet.t_grid[-1]),
        "t_points": int(carpet.t_grid.size),
        "normalization": carpet.normalization,
        **carpet.meta,
    }


def write_raster(carpet: Carpet, path: PathLike, colormap: str = "gray") -> Path:
    """Ковёр как есть: по строкам время (сверху раньше), по столбцам x или θ."""
    return write_image(to_image(carpet.values, colormap, _carpet_meta(carpet)), path)


def rasterize_polar(carpet: Carpet, size: int = DEFAULT_POLAR_SIZE, colormap: str = "gray") -> RasterImage:
    """Полярная развёртка фазового ковра: радиус r ∈ [0, 1] -> t = r·t_max, угол -> θ.

    Ближайший отсчёт по t и θ, без интерполяции. Пиксель закрашивается, только
    если ближайшее t отстоит от r·t_max не больше чем на max(Δt/2, t_max/size);
    всё вне круга остаётся фоном 0.
    """
    if carpet.axis != "theta":
        raise ConfigurationError(f"polar raster needs a phase carpet, got axis {carpet.axis!r}")
    if colormap not in COLORMAPS:
        raise ConfigurationError(f"unknown colormap {colormap!r}; available: {', '.join(COLORMAPS)}")
    if int(size) != size or size < 2:
        raise ConfigurationError(f"polar raster size must be an integer >= 2, got {size!r}")
    t = carpet.t_grid
    t_max = float(t[-1])
    if not t_max > 0:
        raise ConfigurationError("polar raster needs t_max > 0")

    unit, lo, hi = unit_scale(carpet.values)
    m = carpet.values.shape[1]

    c = (np.arange(size) + 0.5) * (2.0 / size) - 1.0
    xx, yy = np.meshgrid(c, -c)
    r = np.hypot(xx, yy)
    theta = np.mod(np.arctan2(yy, xx), 2.0 * math.pi)

    target = r * t_max
    hi_idx = np.clip(np.searchsorted(t, target), 0, t.size - 1)
    lo_idx = np.clip(hi_idx - 1, 0, t.size - 1)
    ti = np.where(np.abs(t[lo_idx] - target) <= np.abs(t[hi_idx] - target), lo_idx, hi_idx)
    dt = float(np.median(np.diff(t))) if t.size > 1 else 0.0
    tol = max(dt / 2.0, t_max / size)
    inside = (r <= 1.0) & (np.abs(t[ti] - target) <= tol)

    ai = np.rint(theta / (2.0 * math.pi) * m).astype(np.int64) % m
    px = _pixels(np.where(inside, unit[ti, ai], 0.0), colormap, mask=inside)
    meta = {
        "projection": "polar",
        "value_min": lo,
        "value_max": hi,
        "mapping": "linear",
        "colormap": colormap,
        "radius_tolerance_t": tol,
        **_carpet_meta(carpet),
    }
    return RasterImage(width=size, height=size, depth=16 if colormap == "gray" else 8, pixels=px, meta=meta)
