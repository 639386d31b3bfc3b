from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._common import ConfigurationError, DomainError
from .dispersive import DispersiveCoefficients
from .propagation import ObservableSeries

log = logging.getLogger(__name__)

COLLAPSE_THRESHOLD = 0.1
REVIVAL_THRESHOLD = 0.5
SAMPLES_PER_PERIOD = 20
MIN_SPAN_PERIODS = 1.5


@dataclass(frozen=True)
class RevivalReport:
    amplitude0: float
    collapse_window: Optional[tuple[float, float]]
    revival_times: tuple[float, ...]
    revival_fidelities: tuple[float, ...]
    predicted_T_rev: float
    diagnostics: tuple[str, ...] = field(default_factory=tuple)

    @property
    def collapsed(self) -> bool:
        return self.collapse_window is not None

    @property
    def first_revival(self) -> Optional[float]:
        return self.revival_times[0] if self.revival_times else None

    def to_text(self) -> str:
        window = "-" if self.collapse_window is None else f"{self.collapse_window[0]:.17g},{self.collapse_window[1]:.17g}"
        lines = [
            f"amplitude0 = {self.amplitude0:.17g}",
            f"collapse_window = {window}",
            f"revival_times = {','.join(f'{t:.17g}' for t in self.revival_times) or '-'}",
            f"revival_fidelities = {','.join(f'{f:.17g}' for f in self.revival_fidelities) or '-'}",
            f"predicted_T_rev = {self.predicted_T_rev:.17g}",
            f"diagnostics = {','.join(self.diagnostics) or '-'}",
        ]
        return "\n".join(lines) + "\n"

    def header(self) -> list[str]:
        return ["index", "t_revival", "fidelity", "predicted_T_rev"]

    def to_rows(self) -> list[list]:
        return [
            [i + 1, t, f, self.predicted_T_rev]
            for i, (t, f) in enumerate(zip(self.revival_times, self.revival_fidelities))
        ]


def talbot_length(a2: float, m: int = 1) -> float:
    """T_Talbot = 2πm/a2."""
    if int(m) != m or m < 1:
        raise ConfigurationError(f"m must be a positive integer, got {m!r}")
    if not a2 > 0:
        raise DomainError(f"harmonic limit has no finite Talbot length (a2={a2})")
    return 2.0 * math.pi * int(m) / float(a2)


def fractional_revival_times(a2: float, q: int) -> list[tuple[int, int, float]]:
    """Предсказанные дробные возрождения p/q·T_rev для несократимых p/q, 0 < p < q."""
    if int(q) != q or q < 2:
        raise ConfigurationError(f"q must be an integer >= 2, got {q!r}")
    t_rev = talbot_length(a2)
    return [(p, int(q), t_rev * p / q) for p in range(1, int(q)) if math.gcd(p, int(q)) == 1]


def _knots(values: np.ndarray) -> np.ndarray:
    """Индексы локальных максимумов |series| (слева нестрого, справа строго)."""
    a = np.abs(values)
    if a.size < 3:
        return np.zeros(0, dtype=int)
    mid = a[1:-1]
    mask = (mid >= a[:-2]) & (mid > a[2:]) & (mid > 0)
    return np.nonzero(mask)[0] + 1


def envelope(series: ObservableSeries, period: float = 2.0 * math.pi) -> ObservableSeries:
    """Кусочно-линейная огибающая через локальные максимумы |⟨x(t)⟩|.

    period: период быстрых колебаний (2π/a1); нужно не меньше 20 отсчётов на период.
    """
    dt = series.dt
    if dt > period / SAMPLES_PER_PERIOD * (1.0 + 1e-9):
        raise ConfigurationError(
            f"sampling too coarse for envelope: dt={dt:g} > period/{SAMPLES_PER_PERIOD}={period / SAMPLES_PER_PERIOD:g}"
        )
    t = series.t_grid
    a = np.abs(series.values)
    knots = _knots(series.values)
    if knots.size == 0:
        peak = float(a.max()) if a.size else 0.0
        return ObservableSeries(t_grid=t, values=np.full(t.size, peak))
    return ObservableSeries(t_grid=t, values=np.interp(t, t[knots], a[knots]))


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Непрерывные отрезки True: [(start, stop_inclusive), ...]."""
    if mask.size == 0:
        return []
    padded = np.concatenate([[False], mask, [False]]).astype(np.int8)
    edges = np.diff(padded)
    starts = np.nonzero(edges == 1)[0]
    stops = np.nonzero(edges == -1)[0] - 1
    return list(zip(starts.tolist(), stops.tolist()))


def detect_revival(
    series: ObservableSeries,
    coeffs: DispersiveCoefficients,
    collapse_threshold: float = COLLAPSE_THRESHOLD,
    revival_threshold: float = REVIVAL_THRESHOLD,
) -> RevivalReport:
    """Окно коллапса и времена возрождений по огибающей ⟨x(t)⟩.

    Коллапс: первый отрезок не короче быстрого периода, где огибающая < collapse_threshold·amplitude0.
    Это не обязательно самый длинный такой отрезок: если огибающая вырастет выше порога
    (например, дробное возрождение на T/2), а потом снова упадёт, второй отрезок в окно не войдёт.
    Возрождение: максимум огибающей на каждом отрезке выше revival_threshold·amplitude0
    после начала коллапса.
    """
    if not 0 < collapse_threshold < revival_threshold:
        raise ConfigurationError(
            f"thresholds must satisfy 0 < collapse ({collapse_threshold}) < revival ({revival_threshold})"
        )
    period = 2.0 * math.pi / coeffs.a1
    env = envelope(series, period)
    t = series.t_grid
    a = np.abs(series.values)
    diagnostics: list[str] = []

    predicted = 2.0 * math.pi / coeffs.a2 if coeffs.a2 > 0 else math.inf
    span = float(t[-1] - t[0])
    if math.isfinite(predicted) and span < MIN_SPAN_PERIODS * predicted:
        log.warning("series spans %.1f < %.1f x predicted T_rev=%.1f", span, MIN_SPAN_PERIODS, predicted)
        diagnostics.append("short_series")

    knots = _knots(series.values)
    amplitude0 = float(np.mean(a[knots[:2]])) if knots.size else 0.0
    if amplitude0 == 0.0:
        diagnostics.append("no_oscillation")
        return RevivalReport(0.0, None, (), (), predicted, tuple(diagnostics + ["no_collapse"]))

    # отрезок короче быстрого периода считается переходом через ноль
    below = env.values < collapse_threshold * amplitude0
    runs = [(s, e) for s, e in _runs(below) if t[e] - t[s] >= period]
    if not runs:
        diagnostics.append("no_collapse")
        return RevivalReport(amplitude0, None, (), (), predicted, tuple(diagnostics))

    start, stop = runs[0]
    collapse = (float(t[start]), float(t[stop]))

    above = env.values >= revival_threshold * amplitude0
    above[: start + 1] = False
    times: list[float] = []
    fidelities: list[float] = []
    for s, e in _runs(above):
        j = s + int(np.argmax(env.values[s : e + 1]))
        times.append(float(t[j]))
        fidelities.append(float(env.values[j] / amplitude0))
    if not times:
        diagnostics.append("no_revival")

    log.info(
        "revival report: collapse=[%.2f, %.2f] revivals=%s predicted=%.2f",
        collapse[0],
        collapse[1],
        [round(x, 2) for x in times],
        predicted,
    )
    return RevivalReport(amplitude0, collapse, tuple(times), tuple(fidelities), predicted, tuple(diagnostics))
