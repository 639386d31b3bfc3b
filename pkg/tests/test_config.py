import numpy as np
import pytest

from talbot.config import RunConfig, env_overrides, load_config, parse_complex, parse_config, parse_value
from talbot.physics import ConfigError


def test_defaults_are_valid():
    cfg = load_config(environ={})
    assert cfg == RunConfig()
    assert cfg.alpha == 4j
    assert cfg.t_grid().size == 12001


def test_parse_config_file():
    text = "\n".join(
        [
            "# ковёр в фазовом пространстве",
            "lambda = 0.02",
            "alpha = 0+4i   # пучок",
            "",
            "modes = 0, 2",
            "polar = yes",
            "domain = phase",
        ]
    )
    cfg = parse_config(text)
    assert cfg.lam == 0.02
    assert cfg.alpha == 4j
    assert cfg.modes == (0, 2)
    assert cfg.polar is True
    assert cfg.domain == "phase"
    assert cfg.t_max == RunConfig().t_max


def test_negative_lambda_names_line_and_key():
    with pytest.raises(ConfigError, match="unbounded potential") as exc:
        parse_config("dt = 0.1\nlambda = -0.1\n")
    assert exc.value.line == 2
    assert exc.value.key == "lambda"


@pytest.mark.parametrize(
    "text, line, key",
    [
        ("n_max = 64\nspeed = 3\n", 2, "speed"),
        ("lambda 0.1\n", 1, None),
        ("n_max = abc\n", 1, "n_max"),
        ("\n\nnormalization = peak\n", 3, "normalization"),
        ("polar = maybe\n", 1, "polar"),
        ("alpha = 4k\n", 1, "alpha"),
    ],
)
def test_config_errors(text, line, key):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.line == line
    assert exc.value.key == key
    assert f"line {line}" in str(exc.value)


def test_parse_complex():
    assert parse_complex("0+4i") == 4j
    assert parse_complex("4i") == 4j
    assert parse_complex("i") == 1j
    assert parse_complex("-1.5-2i") == complex(-1.5, -2)
    assert parse_complex("3") == 3
    assert parse_complex("1+2j") == complex(1, 2)
    with pytest.raises(ValueError):
        parse_complex("inf")


def test_cross_field_checks():
    with pytest.raises(ConfigError, match="aliasing"):
        parse_config("n_max = 300\n")
    assert parse_config("n_max = 0\nphase_points = 64\n").n_max == 0
    with pytest.raises(ConfigError):
        parse_config("lambda_min = 0.3\nlambda_max = 0.1\n")
    with pytest.raises(ConfigError):
        parse_config("t_max = 1\ndt = 2\n")


def test_precedence_env_file_flags():
    environ = {"TALBOT_OUT_DIR": "from-env", "TALBOT_THREADS": "3"}
    cfg = load_config("out_dir = from-file\n", environ=environ)
    assert cfg.out_dir == "from-file"
    assert cfg.threads == 3
    cfg = load_config("out_dir = from-file\n", {"out_dir": "from-flag", "lambda": 0.05, "dt": None}, environ)
    assert cfg.out_dir == "from-flag"
    assert cfg.lam == 0.05
    assert cfg.dt == RunConfig().dt


def test_bad_environment_value():
    with pytest.raises(ConfigError, match="TALBOT_THREADS"):
        env_overrides({"TALBOT_THREADS": "0"})
    assert env_overrides({"TALBOT_DB_PATH": "  "}) == {}


def test_unknown_override():
    with pytest.raises(ConfigError):
        load_config(overrides={"speed": 3}, environ={})


def test_text_round_trip():
    cfg = parse_config("alpha = 1.5-0.25i\nmodes = 1,3\nwindows = true\ntol = 1e-10\n")
    assert parse_config(cfg.to_text()) == cfg
    assert "lambda = 0.01\n" in cfg.to_text()
    assert "alpha = 1.5-0.25i\n" in cfg.to_text()


def test_grids():
    cfg = parse_config("t_max = 1\ndt = 0.25\ncarpet_points = 5\nlambda_points = 1\n")
    np.testing.assert_allclose(cfg.t_grid(), [0.0, 0.25, 0.5, 0.75, 1.0])
    np.testing.assert_allclose(cfg.carpet_t_grid(), [0.0, 0.25, 0.5, 0.75, 1.0])
    assert cfg.carpet_t_grid(2.0, 4.0)[-1] == 4.0
    np.testing.assert_array_equal(cfg.lambda_grid(), [0.0])
    assert cfg.phase_grid().count == 512
    assert cfg.spatial_grid().points[0] == -12.0


def test_carpet_rows_on_the_dt_grid():
    cfg = parse_config("t_max = 1\ndt = 0.25\ncarpet_points = 0\n")
    np.testing.assert_allclose(cfg.carpet_t_grid(), [0.0, 0.25, 0.5, 0.75, 1.0])
    np.testing.assert_allclose(cfg.carpet_t_grid(10.0, 11.0), [10.0, 10.25, 10.5, 10.75, 11.0])
    assert RunConfig(carpet_points=0).carpet_t_grid().size == 12001
    with pytest.raises(ConfigError, match="carpet_points"):
        parse_value("carpet_points", "1")


def test_parse_value_checks():
    assert parse_value("threads", "4") == 4
    with pytest.raises(ConfigError):
        parse_value("threads", "0")
    with pytest.raises(ConfigError):
        parse_value("lambda", "nan")
