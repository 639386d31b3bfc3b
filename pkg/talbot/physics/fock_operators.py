"""Операторы в усечённом базисе Фока: x̂, x̂⁴, n̂ и гамильтониан n̂ + 1/2 + λx̂⁴.

Натуральные единицы ω = m = ħ = 1, x̂ = (â + â†)/√2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ._common import ConfigurationError, check_lambda

log = logging.getLogger(__name__)

DEFAULT_GUARD = 8
MIN_N_MAX = 8
MIN_QUARTIC_GUARD = 4


@dataclass(frozen=True)
class TruncationSpec:
    n_max: int
    guard: int = DEFAULT_GUARD

    def __post_init__(self) -> None:
        if isinstance(self.n_max, bool) or int(self.n_max) != self.n_max:
            raise ConfigurationError(f"n_max must be an integer, got {self.n_max!r}")
        if self.n_max < MIN_N_MAX:
            raise ConfigurationError(f"n_max must be >= {MIN_N_MAX}, got {self.n_max}")
        if int(self.guard) != self.guard or self.guard < 0:
            raise ConfigurationError(f"guard must be a non-negative integer, got {self.guard!r}")

    @property
    def guarded_dim(self) -> int:
        return int(self.n_max) + int(self.guard)


@dataclass(frozen=True, eq=False)
class SymmetricBandMatrix:
    """Симметричная ленточная матрица в верхней LAPACK-форме.

    band[bandwidth + i - j, j] = A[i, j] для j - bandwidth <= i <= j.
    Хранится только одна половина, поэтому entry(i, j) == entry(j, i) точно.
    """

    dim: int
    bandwidth: int
    band: np.ndarray

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ConfigurationError(f"dim must be positive, got {self.dim}")
        if self.bandwidth < 0:
            raise ConfigurationError(f"bandwidth must be non-negative, got {self.bandwidth}")
        if self.band.shape != (self.bandwidth + 1, self.dim):
            raise ConfigurationError(
                f"band storage shape {self.band.shape} does not match ({self.bandwidth + 1}, {self.dim})"
            )
        self.band.setflags(write=False)

    @classmethod
    def from_diagonals(cls, dim: int, diagonals: dict[int, np.ndarray]) -> "SymmetricBandMatrix":
        """diagonals[k]: k-я наддиагональ (длина dim - k)."""
        bw = max(diagonals) if diagonals else 0
        band = np.zeros((bw + 1, dim), dtype=np.float64)
        for k, values in diagonals.items():
            values = np.asarray(values, dtype=np.float64)
            if values.shape != (dim - k,):
                raise ConfigurationError(f"diagonal {k} must have length {dim - k}, got {values.shape}")
            band[bw - k, k:] = values
        return cls(dim=dim, bandwidth=bw, band=band)

    @classmethod
    def from_dense(cls, dense: np.ndarray, bandwidth: int) -> "SymmetricBandMatrix":
        dense = np.asarray(dense, dtype=np.float64)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise ConfigurationError(f"dense matrix must be square, got {dense.shape}")
        dim = dense.shape[0]
        bw = min(int(bandwidth), dim - 1)
        return cls.from_diagonals(dim, {k: np.diagonal(dense, k) for k in range(bw + 1)})

    def diagonal(self, k: int = 0) -> np.ndarray:
        k = abs(int(k))
        if k > self.bandwidth:
            return np.zeros(max(self.dim - k, 0))
        return np.array(self.band[self.bandwidth - k, k:])

    def entry(self, i: int, j: int) -> float:
        if i > j:
            i, j = j, i
        if j - i > self.bandwidth:
            return 0.0
        return float(self.band[self.bandwidth - (j - i), j])

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=np.float64)
        idx = np.arange(self.dim)
        for k in range(self.bandwidth + 1):
            d = self.band[self.bandwidth - k, k:]
            out[idx[: self.dim - k], idx[k:]] = d
            out[idx[k:], idx[: self.dim - k]] = d
        return out

    def to_sparse(self) -> sp.csr_matrix:
        diags = [self.band[self.bandwidth, :]]
        offsets = [0]
        for k in range(1, self.bandwidth + 1):
            d = self.band[self.bandwidth - k, k:]
            diags += [d, d]
            offsets += [k, -k]
        return sp.diags(diags, offsets, shape=(self.dim, self.dim), format="csr")

    def crop(self, n: int) -> "SymmetricBandMatrix":
        if not 1 <= n <= self.dim:
            raise ConfigurationError(f"cannot crop dimension {self.dim} to {n}")
        return SymmetricBandMatrix(dim=n, bandwidth=self.bandwidth, band=np.array(self.band[:, :n]))

    def scaled(self, factor: float) -> "SymmetricBandMatrix":
        return SymmetricBandMatrix(dim=self.dim, bandwidth=self.bandwidth, band=self.band * float(factor))

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        if v.shape[0] != self.dim:
            raise ConfigurationError(f"vector length {v.shape[0]} != matrix dimension {self.dim}")
        bw = self.bandwidth
        out = self.band[bw, :] * v
        for k in range(1, bw + 1):
            d = self.band[bw - k, k:]
            out[:-k] += d * v[k:]
            out[k:] += d * v[:-k]
        return out

    @property
    def parity_separable(self) -> bool:
        """Все нечётные диагонали равны нулю точно (сохраняется чётность)."""
        return all(not np.any(self.band[self.bandwidth - k, k:]) for k in range(1, self.bandwidth + 1, 2))


def build_position(spec: TruncationSpec) -> SymmetricBandMatrix:
    """x̂ = (â + â†)/√2 на расширенной размерности n_max + guard: x[n-1, n] = √(n/2)."""
    dim = spec.guarded_dim
    n = np.arange(1, dim, dtype=np.float64)
    return SymmetricBandMatrix.from_diagonals(dim, {0: np.zeros(dim), 1: np.sqrt(n / 2.0)})


def build_number(spec: TruncationSpec) -> SymmetricBandMatrix:
    return SymmetricBandMatrix.from_diagonals(spec.n_max, {0: np.arange(spec.n_max, dtype=np.float64)})


def build_quartic(spec: TruncationSpec) -> SymmetricBandMatrix:
    """x̂⁴ как четвёртая степень x̂ на расширенном базисе, затем обрезка до n_max.

    Произведение обрезанных матриц портит последние строки; со страховочным
    запасом guard >= 4 все элементы обрезанной матрицы точные.
    """
    if spec.guard < MIN_QUARTIC_GUARD:
        raise ConfigurationError(f"guard must be >= {MIN_QUARTIC_GUARD} for quartic products, got {spec.guard}")
    x = build_position(spec).to_sparse()
    x2 = x @ x
    x4 = (x2 @ x2)[: spec.n_max, : spec.n_max].tocsr()
    return SymmetricBandMatrix.from_diagonals(spec.n_max, {k: x4.diagonal(k) for k in range(5)})


def build_hamiltonian(spec: TruncationSpec, lam: float) -> SymmetricBandMatrix:
    """H = diag(n + 1/2) + λ·x̂⁴ (пятидиагональная, сохраняет чётность)."""
    lam = check_lambda(lam)
    quartic = build_quartic(spec)
    band = quartic.band * lam
    band[quartic.bandwidth, :] += np.arange(spec.n_max, dtype=np.float64) + 0.5
    log.debug("hamiltonian assembled: n_max=%d guard=%d lambda=%g", spec.n_max, spec.guard, lam)
    return SymmetricBandMatrix(dim=spec.n_max, bandwidth=quartic.bandwidth, band=band)
