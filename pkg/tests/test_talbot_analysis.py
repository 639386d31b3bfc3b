import logging
import math

import numpy as np
import pytest

from talbot.physics import (
    ConfigurationError,
    DispersiveCoefficients,
    DomainError,
    ObservableSeries,
    RevivalReport,
    TruncationSpec,
    build_position,
    coherent_state,
    detect_revival,
    dispersive_coefficients,
    envelope,
    evolve_dispersive,
    fractional_revival_times,
    position_expectation,
    position_series,
    talbot_length,
)
from talbot.physics.talbot_analysis import _knots

from tests.conftest import decompose


def synthetic(t_max: float = 500.0) -> ObservableSeries:
    """Колебание с гауссовой огибающей: коллапс и одно возрождение при t = 250."""
    t = 0.05 * np.arange(int(round(t_max / 0.05)) + 1)
    amp = np.exp(-((t / 30.0) ** 2)) + 0.8 * np.exp(-(((t - 250.0) / 30.0) ** 2))
    return ObservableSeries(t, amp * np.sin(t))


SYNTHETIC_COEFFS = DispersiveCoefficients(lam=0.0, a1=1.0, a2=2 * math.pi / 250.0, constant_offset=0.5)


def test_talbot_length():
    assert talbot_length(0.015) == pytest.approx(418.879020, rel=1e-8)
    assert talbot_length(0.015, m=2) == pytest.approx(2 * talbot_length(0.015))
    with pytest.raises(DomainError):
        talbot_length(0.0)
    with pytest.raises(ConfigurationError):
        talbot_length(0.015, m=0)


def test_talbot_length_scales_inversely_with_lambda():
    lengths = [talbot_length(dispersive_coefficients(lam).a2) for lam in (0.005, 0.01, 0.02, 0.04)]
    products = np.array(lengths) * np.array([0.005, 0.01, 0.02, 0.04])
    np.testing.assert_allclose(products, 2 * math.pi / 1.5, rtol=1e-14)


def test_fractional_revival_times():
    period = talbot_length(0.015)
    times = fractional_revival_times(0.015, 4)
    assert [(p, q) for p, q, _ in times] == [(1, 4), (3, 4)]
    assert times[0][2] == pytest.approx(period / 4)
    assert len(fractional_revival_times(0.015, 5)) == 4
    with pytest.raises(ConfigurationError):
        fractional_revival_times(0.015, 1)


def test_envelope_follows_peaks():
    t = np.linspace(0, 100, 4001)
    series = ObservableSeries(t, 3.0 * np.cos(t))
    env = envelope(series)
    assert np.all(np.abs(env.values - 3.0) < 1e-2)


def test_envelope_of_gaussian_damped_sine():
    t = 0.05 * np.arange(2001)
    gauss = np.exp(-((t / 30.0) ** 2))
    env = envelope(ObservableSeries(t, gauss * np.sin(t)))
    inside = (t >= 2.0) & (t <= 40.0)
    np.testing.assert_allclose(env.values[inside], gauss[inside], rtol=0.02)


def test_envelope_bounds(rng):
    t = 0.05 * np.arange(1001)
    values = rng.normal(size=t.size) * (1.0 + np.sin(0.1 * t))
    series = ObservableSeries(t, values)
    env = envelope(series).values
    assert np.all(env <= np.max(np.abs(values)))
    knots = _knots(values)
    assert knots.size > 0
    assert np.all(env[knots] >= np.abs(values[knots]))


def test_zero_series_has_zero_envelope():
    t = np.linspace(0, 10, 201)
    np.testing.assert_array_equal(envelope(ObservableSeries(t, np.zeros_like(t))).values, 0.0)


def test_envelope_rejects_coarse_sampling():
    t = np.arange(0, 100, 0.5)
    with pytest.raises(ConfigurationError, match="too coarse"):
        envelope(ObservableSeries(t, np.sin(t)))


def test_synthetic_collapse_and_revival():
    report = detect_revival(synthetic(), SYNTHETIC_COEFFS)
    assert report.collapsed
    start, stop = report.collapse_window
    assert start == pytest.approx(45.7, abs=3.0)
    assert stop == pytest.approx(206.6, abs=3.0)
    assert len(report.revival_times) == 1
    assert 245.0 <= report.first_revival <= 255.0
    assert report.revival_fidelities[0] == pytest.approx(0.81, abs=0.02)
    assert report.predicted_T_rev == pytest.approx(250.0)
    assert report.diagnostics == ()


def test_collapse_window_is_the_first_run_not_the_longest():
    t = 0.05 * np.arange(12001)
    amp = (
        np.exp(-((t / 15.0) ** 2))
        + 0.9 * np.exp(-(((t - 100.0) / 10.0) ** 2))
        + 0.8 * np.exp(-(((t - 400.0) / 15.0) ** 2))
    )
    report = detect_revival(ObservableSeries(t, amp * np.sin(t)), SYNTHETIC_COEFFS)
    start, stop = report.collapse_window
    # amplitude0 ≈ 0.875 (среднее двух первых пиков): порог коллапса ≈ 0.0875
    assert 20.0 < start < 28.0
    assert 80.0 < stop < 90.0
    assert len(report.revival_times) == 2
    assert report.revival_times[0] == pytest.approx(100.0, abs=3.0)
    assert report.revival_times[1] == pytest.approx(400.0, abs=3.0)


def test_short_series_is_flagged(caplog):
    with caplog.at_level(logging.WARNING):
        report = detect_revival(synthetic(300.0), SYNTHETIC_COEFFS)
    assert "short_series" in report.diagnostics
    assert "predicted T_rev" in caplog.text
    # само возрождение в окне всё равно найдено
    assert 245.0 <= report.first_revival <= 255.0


def test_flat_series_has_no_oscillation():
    t = np.linspace(0, 400, 8001)
    report = detect_revival(ObservableSeries(t, np.zeros_like(t)), SYNTHETIC_COEFFS)
    assert report.amplitude0 == 0.0
    assert "no_oscillation" in report.diagnostics
    assert not report.collapsed


def test_steady_oscillation_has_no_collapse():
    t = np.linspace(0, 400, 8001)
    report = detect_revival(ObservableSeries(t, np.sin(t)), SYNTHETIC_COEFFS)
    assert report.diagnostics == ("no_collapse",)
    assert report.first_revival is None


def test_thresholds_are_validated():
    with pytest.raises(ConfigurationError):
        detect_revival(synthetic(), SYNTHETIC_COEFFS, collapse_threshold=0.5, revival_threshold=0.1)
    with pytest.raises(ConfigurationError):
        detect_revival(synthetic(), SYNTHETIC_COEFFS, collapse_threshold=0.0)


def test_report_rendering():
    report = RevivalReport(1.0, (40.0, 200.0), (250.0, 500.0), (0.8, 0.6), 250.0, ("short_series",))
    text = report.to_text()
    assert "collapse_window = 40,200\n" in text
    assert "revival_times = 250,500\n" in text
    assert text.endswith("diagnostics = short_series\n")
    assert report.to_rows() == [[1, 250.0, 0.8, 250.0], [2, 500.0, 0.6, 250.0]]
    assert report.header() == ["index", "t_revival", "fidelity", "predicted_T_rev"]
    empty = RevivalReport(0.0, None, (), (), math.inf, ())
    assert "collapse_window = -" in empty.to_text()


def full_model_revival(lam: float) -> float:
    d = decompose(lam, 128)
    psi = coherent_state(4j, 128)
    t = 0.05 * np.arange(12001)
    series = position_series(d, psi, build_position(TruncationSpec(128)), t)
    report = detect_revival(series, dispersive_coefficients(lam))
    assert report.collapsed
    return report.first_revival


def dispersive_model_revival(lam: float) -> float:
    coeffs = dispersive_coefficients(lam)
    psi = coherent_state(4j, 64)
    x = build_position(TruncationSpec(64))
    t = 0.05 * np.arange(12001)
    values = [position_expectation(evolve_dispersive(psi, coeffs, tj), x) for tj in t]
    return detect_revival(ObservableSeries(t, np.array(values)), coeffs).first_revival


@pytest.mark.slow
def test_full_model_revival_window():
    assert 300.0 <= full_model_revival(0.01) <= 500.0


@pytest.mark.slow
def test_stronger_anharmonicity_revives_earlier():
    weak = full_model_revival(0.01)
    strong = full_model_revival(0.02)
    assert strong < weak
    assert 1.2 <= weak / strong <= 2.3


@pytest.mark.slow
def test_dispersive_model_revival_halves_with_doubled_lambda():
    weak = dispersive_model_revival(0.01)
    strong = dispersive_model_revival(0.02)
    # ⟨x⟩ восстанавливается уже на половине длины Тальбота
    assert weak == pytest.approx(math.pi / dispersive_coefficients(0.01).a2, abs=3.0)
    assert 1.9 <= weak / strong <= 2.1
