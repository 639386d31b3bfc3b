from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, eig_banded

from ._common import ConfigurationError, ConvergenceError, NumericError, check_lambda
from .fock_operators import DEFAULT_GUARD, SymmetricBandMatrix, TruncationSpec, build_hamiltonian
from .projections import PhaseGrid, SpatialGrid, spatial_basis, to_phase, to_spatial

log = logging.getLogger(__name__)

JACOBI_LIMIT = 64
BOUNDARY_ROWS = 8
BOUNDARY_SUPPORT_TOL = 1e-12
DEFAULT_TOL = 1e-9
DEFAULT_N_CAP = 4096


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    lam: float
    n_max: int
    energies: np.ndarray
    # столбец k: собственный вектор c_n^(k) = <n|φ_k>
    coefficients: np.ndarray
    guard: int = DEFAULT_GUARD
    # |ΔE| между последними размерами базиса (только для converge_spectrum)
    residual: Optional[float] = None
    boundary_support: Optional[float] = None

    def __post_init__(self) -> None:
        self.energies.setflags(write=False)
        self.coefficients.setflags(write=False)

    @property
    def dim(self) -> int:
        return int(self.energies.shape[0])

    def vector(self, k: int) -> np.ndarray:
        return np.array(self.coefficients[:, k])


@dataclass(frozen=True, eq=False)
class SpectrumSweep:
    lambda_grid: np.ndarray
    levels: int
    # table[i, k] = E_k(lambda_grid[i])
    table: np.ndarray
    n_max: tuple[int, ...] = ()
    # max |ΔE_k| между двумя последними размерами базиса
    residual: tuple[float, ...] = ()

    def header(self) -> list[str]:
        return ["lambda"] + [f"E{k}" for k in range(self.levels)]

    def rows(self) -> list[list[float]]:
        return [[float(lam), *map(float, row)] for lam, row in zip(self.lambda_grid, self.table)]


@dataclass(frozen=True, eq=False)
class ModeProfiles:
    ks: tuple[int, ...]
    x: np.ndarray
    spatial: np.ndarray  # (len(ks), len(x)), вещественные φ_k(x)
    theta: np.ndarray
    phase: np.ndarray  # (len(ks), M), комплексные φ_k(θ)


def jacobi_eigh(dense: np.ndarray, tol: float = 1e-14, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Циклический метод Якоби для плотной симметричной матрицы (оракул, n <= 64)."""
    a = np.array(dense, dtype=np.float64)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ConfigurationError(f"jacobi_eigh expects a square matrix, got {a.shape}")
    v = np.eye(n)
    scale = max(1.0, float(np.max(np.abs(np.diag(a)))) if n else 1.0)

    for sweep in range(1, max_sweeps + 1):
        off = math.sqrt(float(np.sum(np.triu(a, 1) ** 2)))
        if off <= tol * scale:
            w = np.diag(a).copy()
            order = np.argsort(w, kind="stable")
            log.debug("jacobi converged after %d sweeps (n=%d)", sweep - 1, n)
            return w[order], v[:, order]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq

    raise NumericError(f"Jacobi iteration did not converge in {max_sweeps} sweeps (n={n})", iterations=max_sweeps)


def _eigh_band(band: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dim = band.shape[1]
    try:
        return eig_banded(band, lower=False)
    except LinAlgError as e:
        if dim <= JACOBI_LIMIT:
            log.warning("band eigensolver failed (%s), falling back to Jacobi (n=%d)", e, dim)
            bw = band.shape[0] - 1
            dense = SymmetricBandMatrix(dim=dim, bandwidth=bw, band=np.array(band)).to_dense()
            return jacobi_eigh(dense)
        # ?sbevd: разделяй и властвуй (?stedc), число итераций LAPACK не сообщает
        raise NumericError(f"band eigensolver (?sbevd) did not converge for n={dim}: {e}") from e


def _eigh_parity_blocks(H: SymmetricBandMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Чётный и нечётный блоки решаются отдельно: чётность векторов точная."""
    bw = H.bandwidth
    sub_bw = bw // 2
    energies: list[np.ndarray] = []
    vectors = np.zeros((H.dim, H.dim), dtype=np.float64)
    col = 0
    for parity in (0, 1):
        idx = np.arange(parity, H.dim, 2)
        if idx.size == 0:
            continue
        sub = np.zeros((sub_bw + 1, idx.size), dtype=np.float64)
        for m in range(sub_bw + 1):
            sub[sub_bw - m, :] = H.band[bw - 2 * m, parity::2]
        w, v = _eigh_band(sub)
        energies.append(w)
        vectors[idx, col : col + idx.size] = v
        col += idx.size
    return np.concatenate(energies), vectors


def _fix_phase(vectors: np.ndarray) -> np.ndarray:
    """Элемент с наибольшим модулем в каждом столбце делаем положительным."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def diagonalize(H: SymmetricBandMatrix, lam: float, guard: int = DEFAULT_GUARD) -> EigenDecomposition:
    if H.parity_separable and H.dim > 1:
        energies, vectors = _eigh_parity_blocks(H)
    else:
        energies, vectors = _eigh_band(np.array(H.band))

    order = np.argsort(energies, kind="stable")
    energies = np.ascontiguousarray(energies[order])
    vectors = _fix_phase(np.ascontiguousarray(vectors[:, order]))

    if H.dim > 1 and np.any(np.diff(energies) <= 0):
        log.warning("spectrum is not strictly ascending (n_max=%d, lambda=%g)", H.dim, lam)
    return EigenDecomposition(lam=float(lam), n_max=H.dim, energies=energies, coefficients=vectors, guard=guard)


def residuals(H: SymmetricBandMatrix, decomp: EigenDecomposition) -> np.ndarray:
    """||H v_k - E_k v_k||_2 для каждого уровня."""
    C = decomp.coefficients
    R = H.to_sparse() @ C - C * decomp.energies[None, :]
    return np.linalg.norm(R, axis=0)


def boundary_support(decomp: EigenDecomposition, k_max: int, rows: int = BOUNDARY_ROWS) -> float:
    """max_{k <= k_max} Σ_{n >= n_max - rows} |c_n^(k)|²."""
    tail = decomp.coefficients[decomp.n_max - rows :, : k_max + 1]
    return float(np.max(np.sum(tail * tail, axis=0)))


def converge_spectrum(
    lam: float,
    k_max: int,
    tol: float = DEFAULT_TOL,
    n_cap: int = DEFAULT_N_CAP,
    guard: int = DEFAULT_GUARD,
    start: Optional[int] = None,
) -> EigenDecomposition:
    """Удваивает n_max, пока уровни k <= k_max не перестанут меняться и не уйдут от границы базиса.

    При λ = 0 гамильтониан диагонален и усечение точно, поэтому первый размер
    принимается без сравнения со следующим.
    """
    lam = check_lambda(lam)
    if int(k_max) != k_max or k_max < 1:
        raise ConfigurationError(f"k_max must be an integer >= 1, got {k_max!r}")
    if not tol > 0:
        raise ConfigurationError(f"tol must be positive, got {tol!r}")

    n = int(start) if start else max(64, 4 * int(k_max))
    if n > n_cap:
        raise ConvergenceError(
            f"initial n_max={n} already exceeds the cap {n_cap}", n_max=n, residual=math.inf, lam=lam
        )

    prev: Optional[np.ndarray] = None
    while True:
        decomp = diagonalize(build_hamiltonian(TruncationSpec(n, guard), lam), lam, guard=guard)
        support = boundary_support(decomp, k_max)
        if prev is None:
            delta = 0.0 if lam == 0.0 else math.inf
        else:
            delta = float(np.max(np.abs(decomp.energies[: k_max + 1] - prev[: k_max + 1])))
        log.debug("converge lambda=%g n_max=%d dE=%.3e boundary=%.3e", lam, n, delta, support)

        if delta < tol and support < BOUNDARY_SUPPORT_TOL:
            log.info("spectrum converged: lambda=%g k_max=%d n_max=%d", lam, k_max, n)
            return replace(decomp, residual=delta, boundary_support=support)

        if 2 * n > n_cap:
            residual = delta if math.isfinite(delta) else support
            raise ConvergenceError(
                f"spectrum not converged at n_max={n} (cap {n_cap}): dE={delta:.3e}, boundary support={support:.3e}",
                n_max=n,
                residual=residual,
                lam=lam,
            )
        prev = np.array(decomp.energies)
        n *= 2


def spectrum_sweep(
    lambda_grid: Sequence[float],
    levels: int,
    tol: float = DEFAULT_TOL,
    n_cap: int = DEFAULT_N_CAP,
    guard: int = DEFAULT_GUARD,
    mapper: Callable[[Callable, Iterable], Iterable] = map,
) -> SpectrumSweep:
    grid = np.asarray(lambda_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ConfigurationError("lambda grid must be a non-empty list")
    if np.any(np.diff(grid) <= 0):
        raise ConfigurationError("lambda grid must be strictly ascending")
    if int(levels) != levels or levels < 1:
        raise ConfigurationError(f"levels must be an integer >= 1, got {levels!r}")
    k_max = max(1, int(levels) - 1)

    def one(lam: float) -> tuple[np.ndarray, int, float]:
        try:
            d = converge_spectrum(float(lam), k_max=k_max, tol=tol, n_cap=n_cap, guard=guard)
        except ConvergenceError as e:
            raise ConvergenceError(f"lambda={lam}: {e}", n_max=e.n_max, residual=e.residual, lam=float(lam)) from e
        return np.array(d.energies[:levels]), d.n_max, float(d.residual)

    results = list(mapper(one, grid.tolist()))
    table = np.vstack([r[0] for r in results])
    return SpectrumSweep(
        lambda_grid=grid,
        levels=int(levels),
        table=table,
        n_max=tuple(r[1] for r in results),
        residual=tuple(r[2] for r in results),
    )


def mode_profiles(
    decomp: EigenDecomposition,
    ks: Sequence[int],
    spatial_grid: SpatialGrid,
    phase_grid: PhaseGrid,
) -> ModeProfiles:
    """φ_k(x) и φ_k(θ) собственных мод (данные для рисунка мод)."""
    ks = tuple(int(k) for k in ks)
    for k in ks:
        if not 0 <= k < decomp.dim:
            raise ConfigurationError(f"mode index {k} outside 0..{decomp.dim - 1}")
    basis = spatial_basis(decomp.dim, spatial_grid)
    spatial = np.vstack([to_spatial(decomp.vector(k), spatial_grid, basis=basis).samples.real for k in ks])
    phase = np.vstack([to_phase(decomp.vector(k), phase_grid).samples for k in ks])
    return ModeProfiles(ks=ks, x=spatial_grid.points, spatial=spatial, theta=phase_grid.points, phase=phase)
