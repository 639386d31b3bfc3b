"""Слабая ангармоничность: H ≈ a1·n̂ + a2·n̂² + (1/2 + 3λ/4), a1 = 1 + 3λ/2, a2 = 3λ/2.

Эволюция считается точно в модовом базисе: d_n(t) = d_n(0)·exp(−i[a1·n + a2·n²]t).
Проекция n̂ -> −i∂_θ даёт i∂_t φ = −i a1 ∂_θ φ − a2 ∂²_θ φ; знак при втором
члене следует из спектра, а не из записи уравнения в θ-пространстве.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._common import check_lambda, check_same_dim
from .propagation import StateVector, evolve_many
from .spectral import EigenDecomposition


@dataclass(frozen=True)
class DispersiveCoefficients:
    lam: float
    a1: float
    a2: float
    # (1/2 + 3λ/4): глобальная фаза в динамике, нужна только для сравнения спектров
    constant_offset: float

    def energy(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.float64)
        return self.a1 * n + self.a2 * n * n + self.constant_offset


def dispersive_coefficients(lam: float) -> DispersiveCoefficients:
    lam = check_lambda(lam)
    return DispersiveCoefficients(
        lam=lam,
        a1=1.0 + 1.5 * lam,
        a2=1.5 * lam,
        constant_offset=0.5 + 0.75 * lam,
    )


def _reduce_turns(turns: float) -> float:
    """Дробная часть числа оборотов в [−1/2, 1/2].

    Целое или полуцелое число оборотов с точностью до округления фиксируется
    точно: при t = T_Talbot и T_Talbot/2 член a2·n² тогда даёт ровно 1 и (−1)ⁿ.
    """
    frac = turns - round(turns)
    half = round(2.0 * frac) / 2.0
    if abs(frac - half) <= 8.0 * np.finfo(np.float64).eps * max(1.0, abs(turns)):
        return half
    return frac


def _mode_phases(n_count: int, coeffs: DispersiveCoefficients, t: float) -> np.ndarray:
    """exp(−i(a1·n + a2·n²)t) с редукцией числа оборотов по модулю 1."""
    n = np.arange(n_count, dtype=np.float64)
    # целая часть числа оборотов, умноженная на целое n или n², фазы не меняет
    frac_1 = _reduce_turns(coeffs.a1 * t / (2.0 * math.pi))
    frac_2 = _reduce_turns(coeffs.a2 * t / (2.0 * math.pi))
    turns = np.mod(frac_1 * n, 1.0) + np.mod(frac_2 * n * n, 1.0)
    return np.exp(-2j * math.pi * turns)


def evolve_dispersive(psi0: StateVector, coeffs: DispersiveCoefficients, t: float) -> StateVector:
    amps = psi0.amplitudes * _mode_phases(psi0.dim, coeffs, float(t))
    return StateVector(
        amplitudes=amps,
        label=f"{psi0.label} @ t={float(t):g} (dispersive)",
        truncation_loss=psi0.truncation_loss,
    )


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|²."""
    check_same_dim(a.dim, b.dim, "state dimension")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def fidelity_series(
    decomp: EigenDecomposition,
    psi0: StateVector,
    coeffs: DispersiveCoefficients,
    t_grid: Sequence[float],
) -> np.ndarray:
    """Совпадение полной и дисперсионной эволюции для каждого t."""
    t = np.asarray(t_grid, dtype=np.float64)
    full = evolve_many(decomp, psi0, t)
    out = np.empty(t.size)
    for j, tj in enumerate(t):
        model = psi0.amplitudes * _mode_phases(psi0.dim, coeffs, float(tj))
        out[j] = abs(np.vdot(full[j], model)) ** 2
    return out
