import numpy as np
import pytest

from talbot.output import (
    encode_image,
    format_value,
    load_colormap,
    rasterize_polar,
    read_csv,
    to_image,
    write_csv,
    write_image,
    write_meta,
    write_raster,
)
from talbot.physics import Carpet, ConfigurationError, OutputError


def ring_carpet(axis: str = "theta") -> Carpet:
    """Каждая строка постоянна и равна своему t: яркость растёт с радиусом."""
    t = np.linspace(0.0, 10.0, 11)
    values = np.repeat(t[:, None], 64, axis=1)
    return Carpet(values=values, t_grid=t, axis=axis, axis_points=np.linspace(0, 2 * np.pi, 64, endpoint=False))


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(np.float64(2.5)) == "2.5"
    assert format_value(np.int64(7)) == "7"
    assert format_value(True) == "1"
    assert format_value("spatial") == "spatial"
    assert float(format_value(1 / 3)) == 1 / 3


def test_csv_layout_and_stability(tmp_path):
    rows = [[0.1, 1], [np.float64(2.5), True]]
    path = write_csv(["t", "value"], rows, tmp_path / "a.csv")
    data = path.read_bytes()
    assert data == b"t,value\n0.10000000000000001,1\n2.5,1\n"
    write_csv(["t", "value"], rows, tmp_path / "a.csv")
    assert path.read_bytes() == data
    assert [p.name for p in tmp_path.iterdir()] == ["a.csv"]


def test_csv_round_trip(tmp_path):
    values = np.random.default_rng(3).normal(size=(5, 3))
    write_csv(["x", "y", "z"], values.tolist(), tmp_path / "r.csv")
    header, rows = read_csv(tmp_path / "r.csv")
    assert header == ["x", "y", "z"]
    np.testing.assert_array_equal(np.array(rows), values)


def test_csv_width_mismatch(tmp_path):
    with pytest.raises(ConfigurationError):
        write_csv(["a", "b"], [[1.0]], tmp_path / "bad.csv")


def test_unwritable_path(tmp_path):
    (tmp_path / "blocker").write_text("x")
    with pytest.raises(OutputError):
        write_csv(["a"], [[1.0]], tmp_path / "blocker" / "out.csv")
    with pytest.raises(OutputError):
        read_csv(tmp_path / "missing.csv")


def test_meta_file(tmp_path):
    path = write_meta({"lambda": 0.01, "domain": "phase"}, tmp_path / "m.txt")
    assert path.read_text() == "lambda = 0.01\ndomain = phase\n"


def test_gray_image_bytes():
    image = to_image(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert encode_image(image) == b"P5\n2 2\n65535\n\x00\x00\xff\xff\xff\xff\x00\x00"
    assert image.meta["value_max"] == 1.0


def test_constant_carpet_maps_to_zero():
    image = to_image(np.full((3, 4), 0.7))
    assert not image.pixels.any()
    with pytest.raises(ConfigurationError):
        to_image(np.array([[0.0, np.inf]]))


def test_viridis_image(tmp_path):
    image = to_image(np.array([[0.0, 1.0]]), colormap="viridis")
    table = load_colormap("viridis")
    assert image.mode == "rgb"
    np.testing.assert_array_equal(image.pixels[0, 1], table[255])
    np.testing.assert_array_equal(image.pixels[0, 0], table[0])
    assert encode_image(image).startswith(b"P6\n2 1\n255\n")
    path = write_image(image, tmp_path / "v.ppm")
    sidecar = (tmp_path / "v.ppm.meta.txt").read_text()
    assert "width = 2\n" in sidecar
    assert "colormap = viridis\n" in sidecar
    assert path.stat().st_size == len(b"P6\n2 1\n255\n") + 6


def test_unknown_colormap():
    with pytest.raises(ConfigurationError):
        to_image(np.zeros((2, 2)), colormap="jet")
    with pytest.raises(ConfigurationError):
        load_colormap("gray")


def test_write_raster_meta(tmp_path):
    write_raster(ring_carpet(), tmp_path / "c.pgm")
    sidecar = (tmp_path / "c.pgm.meta.txt").read_text()
    assert "axis = theta\n" in sidecar
    assert "t_points = 11\n" in sidecar
    assert (tmp_path / "c.pgm").read_bytes().startswith(b"P5\n64 11\n65535\n")


def test_polar_raster_is_radial():
    image = rasterize_polar(ring_carpet(), size=64)
    px = image.pixels
    assert px.shape == (64, 64)
    np.testing.assert_array_equal(np.rot90(px), px)
    # углы вне круга, на краю круга самое позднее t
    assert px[0, 0] == 0
    assert px[32, 63] == 65535
    assert px[31, 31] == 0
    assert image.meta["projection"] == "polar"


def test_polar_raster_needs_phase_carpet():
    with pytest.raises(ConfigurationError):
        rasterize_polar(ring_carpet(axis="x"), size=32)
    with pytest.raises(ConfigurationError):
        rasterize_polar(ring_carpet(), size=1)
