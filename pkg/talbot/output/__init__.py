from .csv_io import atomic_write, format_value, read_csv, write_csv, write_meta
from .raster import (
    COLORMAPS,
    RasterImage,
    encode_image,
    load_colormap,
    rasterize_polar,
    to_image,
    write_image,
    write_raster,
)

__all__ = [
    "atomic_write",
    "format_value",
    "read_csv",
    "write_csv",
    "write_meta",
    "COLORMAPS",
    "RasterImage",
    "encode_image",
    "load_colormap",
    "rasterize_polar",
    "to_image",
    "write_image",
    "write_raster",
]
