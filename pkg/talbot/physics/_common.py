from __future__ import annotations

import math
from typing import Optional

import numpy as np


class SimulationError(RuntimeError):
    """Базовая ошибка расчёта."""
    pass


class ConfigurationError(SimulationError):
    """Неверные размеры, сетки, несогласованные входные данные."""
    pass


class ConfigError(ConfigurationError):
    """Ошибка конфиг-файла: знает номер строки и ключ."""

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")


class DomainError(SimulationError, ValueError):
    """Аргумент вне области определения (λ < 0, n < 0, r ≥ 1, ...)."""
    pass


class NumericError(SimulationError):
    """Итерационный метод не сошёлся."""

    def __init__(self, message: str, iterations: Optional[int] = None):
        self.iterations = iterations
        super().__init__(message)


class ConvergenceError(NumericError):
    """Удвоение базиса упёрлось в потолок n_max."""

    def __init__(self, message: str, n_max: int, residual: float, lam: Optional[float] = None):
        self.n_max = n_max
        self.residual = residual
        self.lam = lam
        super().__init__(message)


class TruncationError(SimulationError):
    """Хвост состояния за пределами усечённого базиса слишком велик."""

    def __init__(self, message: str, suggested_n_max: int):
        self.suggested_n_max = suggested_n_max
        super().__init__(message)


class OutputError(SimulationError):
    pass


def check_lambda(lam: float) -> float:
    lam = float(lam)
    if not math.isfinite(lam):
        raise ConfigurationError(f"lambda must be finite, got {lam!r}")
    if lam < 0:
        raise DomainError(f"unbounded potential: lambda={lam} < 0 (квартичный потенциал не ограничен снизу)")
    return lam


def as_amplitudes(values) -> np.ndarray:
    """Приводит вектор амплитуд Фока к 1-D complex128 и проверяет конечность."""
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise ConfigurationError(f"amplitudes must be a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError("amplitudes contain non-finite entries")
    return arr


def check_same_dim(a: int, b: int, what: str = "dimension") -> None:
    if int(a) != int(b):
        raise ConfigurationError(f"{what} mismatch: {a} != {b}")


def align_global_phase(reference: np.ndarray, other: np.ndarray) -> np.ndarray:
    """Убирает глобальную фазу other относительно reference (по скалярному произведению)."""
    overlap = np.vdot(other, reference)
    if abs(overlap) == 0.0:
        return other
    return other * (overlap / abs(overlap))
