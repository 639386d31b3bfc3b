"""Проекции амплитуд Фока на координатное (Эрмит–Гаусс) и фазовое (граница круга, H²) представления."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import islice
from typing import Iterator, Optional, Sequence, Union

import numpy as np
from scipy.signal import hilbert

from ._common import ConfigurationError, DomainError, as_amplitudes

SQRT_2PI = math.sqrt(2.0 * math.pi)
EXTENSION_TAIL_TOL = 1e-14
# перенормировка рекуррентности, чтобы не переполниться при больших n и |x|
_RESCALE_AT = 1e150


@dataclass(frozen=True, eq=False)
class SpatialGrid:
    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 1 or pts.size < 2:
            raise ConfigurationError("spatial grid needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise ConfigurationError("spatial grid contains non-finite points")
        if np.any(np.diff(pts) <= 0):
            raise ConfigurationError("spatial grid must be strictly ascending")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, x_max: float, count: int) -> "SpatialGrid":
        if not x_max > 0:
            raise ConfigurationError(f"x_max must be positive, got {x_max!r}")
        return cls(np.linspace(-float(x_max), float(x_max), int(count)))

    @classmethod
    def default_for(cls, n_max: int, count: int = 512) -> "SpatialGrid":
        """[-x_max, x_max], x_max = √(2·n_max) + 8: точка поворота плюс запас на затухание."""
        return cls.uniform(math.sqrt(2.0 * n_max) + 8.0, count)

    @property
    def weights(self) -> np.ndarray:
        """Веса формулы трапеций."""
        dx = np.diff(self.points)
        w = np.zeros_like(self.points)
        w[:-1] += dx / 2.0
        w[1:] += dx / 2.0
        return w


@dataclass(frozen=True)
class PhaseGrid:
    count: int

    def __post_init__(self) -> None:
        if int(self.count) != self.count or self.count < 2:
            raise ConfigurationError(f"phase grid needs at least 2 points, got {self.count!r}")

    @property
    def points(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.count) / self.count

    @property
    def step(self) -> float:
        return 2.0 * math.pi / self.count

    def check_alias(self, n_terms: int) -> None:
        if self.count < 2 * n_terms:
            raise ConfigurationError(
                f"aliasing: phase grid M={self.count} < 2·n_max={2 * n_terms}; increase the phase points"
            )


@dataclass(frozen=True, eq=False)
class ComplexField:
    samples: np.ndarray
    # квадратурные веса: ∫|f|² ≈ Σ w_j |f_j|²
    weights: np.ndarray
    points: np.ndarray
    axis: str  # "x" | "theta"

    def density(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def norm(self) -> float:
        return float(np.sum(self.weights * self.density()))


def _hermite_rows(n_count: int, x: np.ndarray) -> Iterator[np.ndarray]:
    """ψ_0(x), ψ_1(x), ..., ψ_{n_count−1}(x) по одной строке; в памяти две строки рекуррентности.

    ψ_{n+1} = √(2/(n+1))·x·ψ_n − √(n/(n+1))·ψ_{n−1}; гауссов множитель держится
    отдельно в логарифме, так что нет ни переполнения, ни преждевременного нуля.
    """
    log_scale = -0.5 * x * x - 0.25 * math.log(math.pi)
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)

    def emit(values: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.sign(values) * np.exp(np.log(np.abs(values)) + log_scale)

    yield emit(p)
    for n in range(n_count - 1):
        p_next = math.sqrt(2.0 / (n + 1)) * x * p - math.sqrt(n / (n + 1)) * p_prev
        p_prev, p = p, p_next
        big = np.abs(p) > _RESCALE_AT
        if np.any(big):
            p[big] /= _RESCALE_AT
            p_prev[big] /= _RESCALE_AT
            log_scale[big] += math.log(_RESCALE_AT)
        yield emit(p)


def spatial_basis(n_count: int, grid: Union[SpatialGrid, np.ndarray]) -> np.ndarray:
    """Таблица ψ_n(x_j), n < n_count."""
    x = grid.points if isinstance(grid, SpatialGrid) else np.atleast_1d(np.asarray(grid, dtype=np.float64))
    n_count = int(n_count)
    if n_count < 1:
        raise DomainError(f"basis size must be >= 1, got {n_count}")
    out = np.empty((n_count, x.size), dtype=np.float64)
    for n, row in enumerate(_hermite_rows(n_count, x)):
        out[n] = row
    return out


def hermite_gauss(n: int, x):
    """ψ_n(x) = H_n(x) e^{−x²/2} / √(2ⁿ n! √π)."""
    if int(n) != n or n < 0:
        raise DomainError(f"Hermite-Gauss index must be a non-negative integer, got {n!r}")
    points = np.atleast_1d(np.asarray(x, dtype=np.float64))
    values = next(islice(_hermite_rows(int(n) + 1, points), int(n), None))
    return float(values[0]) if np.ndim(x) == 0 else values.reshape(np.shape(x))


def to_spatial(amplitudes, grid: SpatialGrid, basis: Optional[np.ndarray] = None) -> ComplexField:
    """ψ(x_j) = Σ_n a_n ψ_n(x_j)."""
    a = as_amplitudes(amplitudes)
    if basis is None:
        basis = spatial_basis(a.size, grid)
    elif basis.shape[0] < a.size or basis.shape[1] != grid.points.size:
        raise ConfigurationError(f"basis table {basis.shape} does not cover {a.size} modes on {grid.points.size} points")
    samples = a @ basis[: a.size]
    return ComplexField(samples=samples, weights=grid.weights, points=grid.points, axis="x")


def to_phase(amplitudes, grid: PhaseGrid) -> ComplexField:
    """φ(θ_j) = (2π)^{−1/2} Σ_{n≥0} a_n e^{inθ_j} через обратное ДПФ с нулями на отрицательных частотах."""
    a = as_amplitudes(amplitudes)
    grid.check_alias(a.size)
    padded = np.zeros(grid.count, dtype=np.complex128)
    padded[: a.size] = a
    samples = np.fft.ifft(padded) * (grid.count / SQRT_2PI)
    return ComplexField(samples=samples, weights=np.full(grid.count, grid.step), points=grid.points, axis="theta")


def to_phase_direct(amplitudes, grid: PhaseGrid) -> ComplexField:
    """Прямое суммирование ряда, оракул для to_phase."""
    a = as_amplitudes(amplitudes)
    grid.check_alias(a.size)
    theta = grid.points
    kernel = np.exp(1j * np.outer(np.arange(a.size), theta))
    samples = (a @ kernel) / SQRT_2PI
    return ComplexField(samples=samples, weights=np.full(grid.count, grid.step), points=theta, axis="theta")


def hilbert_partner(
    cosine_coeffs: Sequence[float],
    sine_coeffs: Sequence[float],
    free_constant: float = 0.0,
    grid: Optional[PhaseGrid] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Пара φ_R, φ_I, связанная преобразованием Гильберта.

    φ_R = a_0 + Σ a_k cos kθ − Σ b_k sin kθ,
    φ_I = a_I0 + Σ b_k cos kθ + Σ a_k sin kθ  (k >= 1, sine_coeffs[0] не используется).
    """
    a = np.asarray(cosine_coeffs, dtype=np.float64)
    b = np.asarray(sine_coeffs, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape or a.size == 0:
        raise ConfigurationError(f"coefficient lists must be non-empty and of equal length, got {a.shape} and {b.shape}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and math.isfinite(free_constant)):
        raise ConfigurationError("coefficients must be finite")
    if grid is None:
        grid = PhaseGrid(max(64, 2 * a.size))
    grid.check_alias(a.size)

    theta = grid.points
    k = np.arange(1, a.size)
    cos_kt = np.cos(np.outer(k, theta))
    sin_kt = np.sin(np.outer(k, theta))
    phi_r = a[0] + a[1:] @ cos_kt - b[1:] @ sin_kt
    phi_i = float(free_constant) + b[1:] @ cos_kt + a[1:] @ sin_kt
    return phi_r, phi_i


def fourier_coefficients(phi_r: np.ndarray, n_terms: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Обратная операция к разложению φ_R: (a_k, b_k) по отсчётам на равномерной сетке."""
    phi_r = np.asarray(phi_r, dtype=np.float64)
    m = phi_r.size
    if n_terms is None:
        n_terms = m // 2
    if not 1 <= n_terms <= m // 2:
        raise ConfigurationError(f"n_terms must be in 1..{m // 2}, got {n_terms}")
    spectrum = np.fft.rfft(phi_r)[:n_terms]
    a = np.empty(n_terms)
    b = np.zeros(n_terms)
    a[0] = spectrum[0].real / m
    a[1:] = 2.0 * spectrum[1:].real / m
    b[1:] = 2.0 * spectrum[1:].imag / m
    return a, b


def hilbert_imaginary(phi_r: np.ndarray) -> np.ndarray:
    """φ_I из φ_R через аналитический сигнал (свободная константа = 0)."""
    return np.imag(hilbert(np.asarray(phi_r, dtype=np.float64)))


def analytic_extension(amplitudes, r: float, theta):
    """Φ(re^{iθ}) = (2π)^{−1/2} Σ a_n rⁿ e^{inθ}; ряд обрывается, когда оценка хвоста < 1e−14."""
    a = as_amplitudes(amplitudes)
    r = float(r)
    if not 0.0 <= r < 1.0:
        raise DomainError(f"analytic extension needs 0 <= r < 1, got r={r}")

    abs_a = np.abs(a)
    # tail[N] = Σ_{n > N} |a_n|
    tail = np.concatenate([np.cumsum(abs_a[::-1])[::-1][1:], [0.0]])
    n = np.arange(a.size)
    bound = tail * np.power(r, n + 1) / (1.0 - r)
    last = int(np.argmax(bound < EXTENSION_TAIL_TOL))

    terms = a[: last + 1] * np.power(r, n[: last + 1])
    th = np.asarray(theta, dtype=np.float64)
    values = np.exp(1j * np.multiply.outer(th, n[: last + 1])) @ terms / SQRT_2PI
    return complex(values) if np.ndim(theta) == 0 else values


def rotate(amplitudes, angle: float) -> np.ndarray:
    """Жёсткий поворот: φ(θ) -> φ(θ − angle), т.е. a_n -> a_n e^{−in·angle}."""
    a = as_amplitudes(amplitudes)
    return a * np.exp(-1j * float(angle) * np.arange(a.size))


def phase_moment(amplitudes) -> complex:
    """∫|φ|² e^{iθ} dθ = Σ a_n a*_{n+1}; модуль задаёт степень локализации фазы."""
    a = as_amplitudes(amplitudes)
    return complex(np.sum(a[:-1] * np.conj(a[1:])))
