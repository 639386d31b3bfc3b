"""Встроенные проверки: аналитические оракулы для гармонического предела, теории возмущений и модели a1·n + a2·n²."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from talbot.physics import (
    PhaseGrid,
    SpatialGrid,
    TruncationSpec,
    align_global_phase,
    build_hamiltonian,
    build_position,
    carpet,
    coherent_state,
    detect_revival,
    diagonalize,
    dispersive_coefficients,
    evolve,
    evolve_dispersive,
    fidelity,
    hilbert_partner,
    jacobi_eigh,
    position_series,
    residuals,
    rotate,
    talbot_length,
    to_phase,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    limit: float
    # "le": value <= limit, "ge": value >= limit
    mode: str = "le"
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        return self.value <= self.limit if self.mode == "le" else self.value >= self.limit

    def line(self) -> str:
        sign = "<=" if self.mode == "le" else ">="
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.value:.3e} {sign} {self.limit:.0e} ({self.seconds:.2f}s)"


def _decomp(lam: float, n_max: int):
    return diagonalize(build_hamiltonian(TruncationSpec(n_max), lam), lam)


def harmonic_spectrum(seed: int) -> float:
    d = _decomp(0.0, 64)
    return float(np.max(np.abs(d.energies - (np.arange(64) + 0.5))))


def perturbative_spectrum(seed: int) -> float:
    lam = 1e-4
    d = _decomp(lam, 64)
    k = np.arange(11)
    expected = k + 0.5 + 0.75 * lam * (2 * k * k + 2 * k + 1)
    return float(np.max(np.abs(d.energies[:11] - expected)))


def pentadiagonal_parity(seed: int) -> float:
    """Максимум из элементов вне {0, ±2, ±4} и массы «чужой» чётности."""
    H = build_hamiltonian(TruncationSpec(64), 0.05)
    dense = H.to_dense()
    i, j = np.indices(dense.shape)
    outside = float(np.max(np.abs(dense[~np.isin(np.abs(i - j), (0, 2, 4))])))
    d = diagonalize(H, 0.05)
    C = d.coefficients
    even = np.sum(C[0::2] ** 2, axis=0)
    odd = np.sum(C[1::2] ** 2, axis=0)
    minority = float(np.max(np.minimum(even, odd)))
    return max(outside, minority)


def eigen_residual(seed: int) -> float:
    H = build_hamiltonian(TruncationSpec(128), 0.01)
    return float(np.max(residuals(H, diagonalize(H, 0.01))))


def orthonormality(seed: int) -> float:
    d = _decomp(0.01, 128)
    gram = d.coefficients.T @ d.coefficients
    return float(np.max(np.abs(gram - np.eye(d.dim))))


def jacobi_agreement(seed: int) -> float:
    H = build_hamiltonian(TruncationSpec(32), 0.1)
    w, _ = jacobi_eigh(H.to_dense())
    return float(np.max(np.abs(w - diagonalize(H, 0.1).energies)))


def rigid_rotation(seed: int) -> float:
    d = _decomp(0.0, 64)
    psi0 = coherent_state(4j, 64)
    grid = PhaseGrid(512)
    t = 2.0 * math.pi * np.arange(0, 512, 37) / 512
    c = carpet(d, psi0, "phase", grid, t, normalization="none")
    worst = 0.0
    for row, k in zip(c.values, range(0, 512, 37)):
        worst = max(worst, float(np.max(np.abs(row - np.roll(c.values[0], k)))))
    return worst


def hilbert_pairing(seed: int) -> float:
    rng = np.random.default_rng(seed)
    grid = PhaseGrid(64)
    worst = 0.0
    for _ in range(100):
        k = int(rng.integers(1, 17))
        a = rng.normal(size=k + 1)
        b = rng.normal(size=k + 1)
        phi_r, phi_i = hilbert_partner(a, b, free_constant=float(rng.normal()), grid=grid)
        spectrum = np.fft.fft(phi_r + 1j * phi_i) / grid.count
        worst = max(worst, float(np.max(np.abs(spectrum[grid.count // 2 + 1 :]))))
    return worst


def harmonic_position(seed: int) -> float:
    d = _decomp(0.0, 64)
    x_op = build_position(TruncationSpec(64))
    t = np.linspace(0.0, 20.0, 401)
    series = position_series(d, coherent_state(4j, 64), x_op, t)
    return float(np.max(np.abs(series.values - 4.0 * math.sqrt(2.0) * np.sin(t))))


def coherent_rotation(seed: int) -> float:
    """При λ = 0 пучок α = 4i остаётся когерентным: α(t) = α e^{−it} с точностью до глобальной фазы."""
    d = _decomp(0.0, 128)
    psi0 = coherent_state(4j, 128)
    worst = 0.0
    for t in (0.7, 3.3, 10.0):
        expected = coherent_state(4j * np.exp(-1j * t), 128).amplitudes
        aligned = align_global_phase(expected, evolve(d, psi0, t).amplitudes)
        worst = max(worst, float(np.max(np.abs(aligned - expected))))
    return worst


def dispersive_exactness(seed: int) -> float:
    """Через T = 2π/a2 модель даёт жёсткий поворот на a1·T, а через T/2 ещё на π."""
    coeffs = dispersive_coefficients(0.01)
    linear = replace(coeffs, a2=0.0)
    psi0 = coherent_state(4j, 64)
    grid = PhaseGrid(512)
    worst = 0.0
    period = talbot_length(coeffs.a2)
    for t, extra in ((period, 0.0), (period / 2.0, math.pi)):
        model = to_phase(evolve_dispersive(psi0, coeffs, t).amplitudes, grid).density()
        shifted = rotate(evolve_dispersive(psi0, linear, t).amplitudes, extra)
        worst = max(worst, float(np.max(np.abs(model - to_phase(shifted, grid).density()))))
    return worst


def dispersive_fidelity(seed: int) -> float:
    lam = 0.01
    d = _decomp(lam, 64)
    psi0 = coherent_state(1.0, 64)
    full = evolve(d, psi0, 10.0)
    model = evolve_dispersive(psi0, dispersive_coefficients(lam), 10.0)
    return fidelity(full, model)


def carpet_norms(seed: int) -> float:
    d = _decomp(0.01, 128)
    psi0 = coherent_state(4j, 128)
    t = np.linspace(0.0, 50.0, 101)
    worst = 0.0
    for domain, grid in (("spatial", SpatialGrid.uniform(12.0, 1024)), ("phase", PhaseGrid(512))):
        c = carpet(d, psi0, domain, grid, t, normalization="none")
        worst = max(worst, float(np.max(np.abs(c.row_integrals - 1.0))))
    return worst


def collapse_revival(seed: int) -> float:
    """Первое возрождение при λ = 0.01 (0, если не найдено или коллапса нет)."""
    lam = 0.01
    d = _decomp(lam, 128)
    x_op = build_position(TruncationSpec(128))
    t = 0.05 * np.arange(12001)
    series = position_series(d, coherent_state(4j, 128), x_op, t)
    report = detect_revival(series, dispersive_coefficients(lam))
    if not report.collapsed or report.first_revival is None:
        return 0.0
    return float(report.first_revival)


# имя, функция, порог, режим
CHECKS: list[tuple[str, Callable[[int], float], float, str]] = [
    ("harmonic_spectrum", harmonic_spectrum, 1e-10, "le"),
    ("perturbative_spectrum", perturbative_spectrum, 1e-5, "le"),
    ("pentadiagonal_parity", pentadiagonal_parity, 1e-20, "le"),
    ("eigen_residual", eigen_residual, 1e-9, "le"),
    ("orthonormality", orthonormality, 1e-10, "le"),
    ("jacobi_agreement", jacobi_agreement, 1e-10, "le"),
    ("rigid_rotation", rigid_rotation, 1e-8, "le"),
    ("hilbert_pairing", hilbert_pairing, 1e-12, "le"),
    ("harmonic_position", harmonic_position, 1e-8, "le"),
    ("coherent_rotation", coherent_rotation, 1e-10, "le"),
    ("dispersive_exactness", dispersive_exactness, 1e-12, "le"),
    ("dispersive_fidelity", dispersive_fidelity, 0.95, "ge"),
    ("carpet_norms", carpet_norms, 1e-8, "le"),
]


def _run(name: str, fn: Callable[[int], float], limit: float, mode: str, seed: int) -> CheckResult:
    started = time.perf_counter()
    value = fn(seed)
    return CheckResult(name=name, value=value, limit=limit, mode=mode, seconds=time.perf_counter() - started)


def run_selftest(seed: int = 0, include_slow: bool = True) -> list[CheckResult]:
    results = [_run(name, fn, limit, mode, seed) for name, fn, limit, mode in CHECKS]
    if include_slow:
        lower = _run("first_revival_lower", collapse_revival, 300.0, "ge", seed)
        results.append(lower)
        results.append(replace(lower, name="first_revival_upper", limit=500.0, mode="le"))
    for res in results:
        log.info(res.line())
    return results
