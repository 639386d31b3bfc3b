from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import gammainc, gammaln

from ._common import ConfigurationError, DomainError, NumericError, TruncationError, as_amplitudes, check_same_dim
from .fock_operators import SymmetricBandMatrix
from .projections import PhaseGrid, SpatialGrid, spatial_basis
from .spectral import EigenDecomposition

log = logging.getLogger(__name__)

TAIL_TOL = 1e-12
IMAG_RESIDUE_TOL = 1e-12
# фиксированный размер блока строк ковра: результат не зависит от числа потоков
CARPET_CHUNK = 256

NORMALIZATIONS = ("frame", "global", "none")


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    label: str = ""
    truncation_loss: float = 0.0

    def __post_init__(self) -> None:
        arr = as_amplitudes(self.amplitudes)
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    t_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t_grid, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if t.shape != v.shape or t.ndim != 1:
            raise ConfigurationError(f"series lengths differ: t {t.shape}, values {v.shape}")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ConfigurationError("series contains non-finite values")
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "values", v)

    @property
    def dt(self) -> float:
        return float(np.median(np.diff(self.t_grid))) if self.t_grid.size > 1 else 0.0


@dataclass(frozen=True, eq=False)
class Carpet:
    values: np.ndarray  # строка на момент времени, столбец на точку x или θ
    t_grid: np.ndarray
    axis: str  # "x" | "theta"
    axis_points: np.ndarray
    normalization: str = "frame"
    # ∫|field|² по каждой строке до нормировки
    row_integrals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    meta: dict = field(default_factory=dict)

    @property
    def t_max(self) -> float:
        return float(self.t_grid[-1])


def coherent_state(alpha: complex, n_max: int) -> StateVector:
    """d_n = e^{−|α|²/2} αⁿ/√(n!), считается в логарифмах и перенормируется."""
    alpha = complex(alpha)
    if int(n_max) != n_max or n_max < 1:
        raise ConfigurationError(f"n_max must be a positive integer, got {n_max!r}")
    mean = abs(alpha) ** 2
    label = f"coherent(alpha={alpha.real:g}{alpha.imag:+g}i)"
    if mean == 0.0:
        amps = np.zeros(n_max, dtype=np.complex128)
        amps[0] = 1.0
        return StateVector(amplitudes=amps, label=label, truncation_loss=0.0)

    # P(Poisson(|α|²) >= n_max)
    tail = float(gammainc(n_max, mean))
    if tail > TAIL_TOL:
        suggested = int(n_max)
        while float(gammainc(suggested, mean)) > TAIL_TOL:
            suggested *= 2
        raise TruncationError(
            f"coherent state |alpha|={abs(alpha):g} loses {tail:.3e} of its norm beyond n_max={n_max}; "
            f"use n_max >= {suggested}",
            suggested_n_max=suggested,
        )

    n = np.arange(n_max)
    log_mod = -0.5 * mean + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    amps = np.exp(log_mod) * np.exp(1j * n * math.atan2(alpha.imag, alpha.real))
    amps = amps / np.linalg.norm(amps)
    log.debug("coherent state alpha=%s n_max=%d tail=%.3e", alpha, n_max, tail)
    return StateVector(amplitudes=amps, label=label, truncation_loss=tail)


def fock_state(n: int, n_max: int) -> StateVector:
    if int(n) != n or int(n_max) != n_max or not 0 <= n < n_max:
        raise DomainError(f"Fock index must satisfy 0 <= n < n_max, got n={n}, n_max={n_max}")
    amps = np.zeros(int(n_max), dtype=np.complex128)
    amps[int(n)] = 1.0
    return StateVector(amplitudes=amps, label=f"fock({n})")


def _project(decomp: EigenDecomposition, psi0: StateVector) -> np.ndarray:
    check_same_dim(psi0.dim, decomp.dim, "state/decomposition dimension")
    return decomp.coefficients.T @ psi0.amplitudes


def evolve(decomp: EigenDecomposition, psi0: StateVector, t: float) -> StateVector:
    """d(t) = C e^{−iEt} Cᵀ d(0)."""
    proj = _project(decomp, psi0)
    amps = decomp.coefficients @ (np.exp(-1j * decomp.energies * float(t)) * proj)
    return StateVector(amplitudes=amps, label=f"{psi0.label} @ t={float(t):g}", truncation_loss=psi0.truncation_loss)


def evolve_many(decomp: EigenDecomposition, psi0: StateVector, t_grid: Sequence[float]) -> np.ndarray:
    """Амплитуды для всех t сразу: строка j содержит d(t_j)."""
    proj = _project(decomp, psi0)
    t = np.asarray(t_grid, dtype=np.float64)
    phases = np.exp(-1j * np.outer(t, decomp.energies))
    return (phases * proj[None, :]) @ decomp.coefficients.T


def _embed(amplitudes: np.ndarray, dim: int) -> np.ndarray:
    """Дополняет вектор нулями до размерности оператора со страховочными уровнями."""
    if amplitudes.shape[-1] > dim:
        raise ConfigurationError(f"state dimension {amplitudes.shape[-1]} exceeds operator dimension {dim}")
    if amplitudes.shape[-1] == dim:
        return amplitudes
    pad = [(0, 0)] * (amplitudes.ndim - 1) + [(0, dim - amplitudes.shape[-1])]
    return np.pad(amplitudes, pad)


def _expectation(amplitudes: np.ndarray, op: SymmetricBandMatrix) -> np.ndarray:
    d = _embed(amplitudes, op.dim)
    values = np.einsum("...i,...i->...", np.conj(d), (op.to_sparse() @ d.T).T)
    scale = np.maximum(1.0, np.abs(values.real))
    if np.any(np.abs(values.imag) > IMAG_RESIDUE_TOL * scale):
        raise NumericError(f"expectation value has imaginary residue {np.max(np.abs(values.imag)):.3e}")
    return values.real


def position_expectation(psi: StateVector, x_op: SymmetricBandMatrix) -> float:
    """<x> = dᴴ x d; мнимый остаток проверяется и отбрасывается."""
    return float(_expectation(psi.amplitudes, x_op))


def energy_expectation(psi: StateVector, H: SymmetricBandMatrix) -> float:
    return float(_expectation(psi.amplitudes, H))


def mean_mode_number(psi: StateVector) -> float:
    probs = np.abs(psi.amplitudes) ** 2
    return float(np.sum(np.arange(psi.dim) * probs))


def position_series(
    decomp: EigenDecomposition,
    psi0: StateVector,
    x_op: SymmetricBandMatrix,
    t_grid: Sequence[float],
) -> ObservableSeries:
    t = np.asarray(t_grid, dtype=np.float64)
    values = np.empty(t.size)
    for start in range(0, t.size, CARPET_CHUNK):
        stop = min(start + CARPET_CHUNK, t.size)
        values[start:stop] = _expectation(evolve_many(decomp, psi0, t[start:stop]), x_op)
    return ObservableSeries(t_grid=t, values=values)


def revival_windows(t_rev: float, width: float = 25.0) -> list[tuple[float, float]]:
    """Три окна карты: начало, половина и полный период возрождения."""
    half = width / 2.0
    return [
        (0.0, float(width)),
        (t_rev / 2.0 - half, t_rev / 2.0 + half),
        (t_rev - half, t_rev + half),
    ]


def carpet(
    decomp: EigenDecomposition,
    psi0: StateVector,
    domain: str,
    grid,
    t_grid: Sequence[float],
    normalization: str = "frame",
    mapper: Callable[[Callable, Iterable], Iterable] = map,
) -> Carpet:
    """Ковёр Тальбота |ψ(x,t)|² или |φ(θ,t)|²: строка j соответствует t_j."""
    if normalization not in NORMALIZATIONS:
        raise ConfigurationError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")
    t = np.asarray(t_grid, dtype=np.float64)
    if t.ndim != 1 or t.size == 0 or not np.all(np.isfinite(t)):
        raise ConfigurationError("time grid must be a non-empty finite list")
    if np.any(np.diff(t) <= 0):
        raise ConfigurationError("time grid must be strictly ascending")

    if domain == "spatial":
        if not isinstance(grid, SpatialGrid):
            raise ConfigurationError("spatial carpet needs a SpatialGrid")
        basis = spatial_basis(decomp.dim, grid)
        weights = grid.weights

        def rows(block: np.ndarray) -> np.ndarray:
            return np.abs(block @ basis) ** 2

        axis, points = "x", grid.points
    elif domain == "phase":
        if not isinstance(grid, PhaseGrid):
            raise ConfigurationError("phase carpet needs a PhaseGrid")
        grid.check_alias(decomp.dim)
        weights = np.full(grid.count, grid.step)

        def rows(block: np.ndarray) -> np.ndarray:
            padded = np.zeros((block.shape[0], grid.count), dtype=np.complex128)
            padded[:, : block.shape[1]] = block
            return np.abs(np.fft.ifft(padded, axis=1) * (grid.count / math.sqrt(2.0 * math.pi))) ** 2

        axis, points = "theta", grid.points
    else:
        raise ConfigurationError(f"domain must be 'spatial' or 'phase', got {domain!r}")

    values = np.empty((t.size, points.size), dtype=np.float64)
    chunks = [(s, min(s + CARPET_CHUNK, t.size)) for s in range(0, t.size, CARPET_CHUNK)]

    def fill(chunk: tuple[int, int]) -> int:
        start, stop = chunk
        values[start:stop] = rows(evolve_many(decomp, psi0, t[start:stop]))
        return stop - start

    done = sum(mapper(fill, chunks))
    log.debug("carpet %s: %d rows in %d chunks", domain, done, len(chunks))

    integrals = values @ weights
    if normalization == "frame":
        peaks = values.max(axis=1)
        peaks[peaks == 0] = 1.0
        values = values / peaks[:, None]
    elif normalization == "global":
        peak = float(values.max())
        if peak > 0:
            values = values / peak

    meta = {
        "lambda": decomp.lam,
        "n_max": decomp.n_max,
        "state": psi0.label,
        "domain": domain,
        "normalization": normalization,
        "row_integral_min": float(integrals.min()),
        "row_integral_max": float(integrals.max()),
    }
    return Carpet(
        values=values,
        t_grid=t,
        axis=axis,
        axis_points=np.array(points),
        normalization=normalization,
        row_integrals=integrals,
        meta=meta,
    )
