import math

import numpy as np
import pytest
from scipy.linalg import expm

from talbot.physics import (
    ConfigurationError,
    DomainError,
    ObservableSeries,
    PhaseGrid,
    SpatialGrid,
    TruncationError,
    TruncationSpec,
    align_global_phase,
    build_hamiltonian,
    build_position,
    carpet,
    coherent_state,
    energy_expectation,
    evolve,
    evolve_many,
    fock_state,
    mean_mode_number,
    position_expectation,
    position_series,
    revival_windows,
)
from talbot.runtime import Runtime

from tests.conftest import decompose


def test_coherent_state_statistics(beam64):
    assert beam64.norm() == pytest.approx(1.0, abs=1e-14)
    assert mean_mode_number(beam64) == pytest.approx(16.0, abs=1e-10)
    assert beam64.truncation_loss < 1e-12


def test_coherent_state_truncation_is_reported():
    with pytest.raises(TruncationError) as exc:
        coherent_state(4j, 16)
    assert exc.value.suggested_n_max == 64


def test_vacuum_coherent_state():
    psi = coherent_state(0, 8)
    np.testing.assert_array_equal(psi.amplitudes, np.eye(8)[0])
    with pytest.raises(ConfigurationError):
        coherent_state(1.0, 0)


def test_fock_state_bounds():
    assert fock_state(3, 8).amplitudes[3] == 1.0
    with pytest.raises(DomainError):
        fock_state(8, 8)
    with pytest.raises(DomainError):
        fock_state(-1, 8)


def test_evolve_at_zero_is_identity(weak128, beam128):
    np.testing.assert_allclose(evolve(weak128, beam128, 0.0).amplitudes, beam128.amplitudes, atol=1e-12)


def test_evolution_is_unitary_and_composes(weak128, beam128):
    once = evolve(weak128, beam128, 3.7)
    assert once.norm() == pytest.approx(1.0, abs=1e-12)
    twice = evolve(weak128, evolve(weak128, beam128, 1.2), 2.5)
    np.testing.assert_allclose(twice.amplitudes, once.amplitudes, atol=1e-11)


def test_evolution_matches_matrix_exponential():
    lam, n_max, t = 0.1, 32, 2.3
    d = decompose(lam, n_max)
    H = build_hamiltonian(TruncationSpec(n_max), lam).to_dense()
    psi = coherent_state(1.0 + 0.5j, n_max)
    expected = expm(-1j * H * t) @ psi.amplitudes
    np.testing.assert_allclose(evolve(d, psi, t).amplitudes, expected, atol=1e-10)


@pytest.mark.parametrize("t", [0.7, 3.3, 10.0])
def test_harmonic_beam_stays_coherent(t):
    d = decompose(0.0, 128)
    evolved = evolve(d, coherent_state(4j, 128), t).amplitudes
    rotated = coherent_state(4j * np.exp(-1j * t), 128).amplitudes
    # без выравнивания мешает фаза нулевых колебаний e^{−it/2}
    assert np.linalg.norm(evolved - rotated) > 0.3
    np.testing.assert_allclose(align_global_phase(rotated, evolved), rotated, atol=1e-10)


def test_align_global_phase():
    a = coherent_state(1.0 - 2.0j, 32).amplitudes
    np.testing.assert_allclose(align_global_phase(a, np.exp(0.4j) * a), a, atol=1e-15)
    orthogonal = fock_state(1, 4).amplitudes
    assert align_global_phase(fock_state(0, 4).amplitudes, orthogonal) is orthogonal


def test_evolve_many_rows_match_single_steps(weak128, beam128):
    t = [0.0, 0.5, 11.0]
    rows = evolve_many(weak128, beam128, t)
    for row, tj in zip(rows, t):
        np.testing.assert_allclose(row, evolve(weak128, beam128, tj).amplitudes, atol=1e-12)


def test_dimension_mismatch(harmonic64, beam128):
    with pytest.raises(ConfigurationError):
        evolve(harmonic64, beam128, 1.0)


def test_harmonic_position_oscillates(harmonic64, beam64):
    t = np.linspace(0.0, 20.0, 401)
    series = position_series(harmonic64, beam64, build_position(TruncationSpec(64)), t)
    np.testing.assert_allclose(series.values, 4.0 * math.sqrt(2.0) * np.sin(t), atol=1e-8)


def test_position_of_fock_state_is_zero(x128):
    assert position_expectation(fock_state(7, 128), x128) == pytest.approx(0.0, abs=1e-15)


def test_energy_is_conserved(weak128, beam128):
    H = build_hamiltonian(TruncationSpec(128), 0.01)
    e0 = energy_expectation(beam128, H)
    for t in (1.0, 50.0, 400.0):
        assert energy_expectation(evolve(weak128, beam128, t), H) == pytest.approx(e0, rel=1e-10)


def test_observable_series_validation():
    with pytest.raises(ConfigurationError):
        ObservableSeries(np.arange(3.0), np.arange(4.0))
    with pytest.raises(ConfigurationError):
        ObservableSeries(np.arange(3.0), np.array([0.0, np.nan, 1.0]))
    assert ObservableSeries(np.linspace(0, 1, 11), np.zeros(11)).dt == pytest.approx(0.1)


def test_harmonic_phase_carpet_rotates_rigidly(harmonic64, beam64):
    grid = PhaseGrid(128)
    k = np.arange(0, 128, 9)
    c = carpet(harmonic64, beam64, "phase", grid, 2 * np.pi * k / 128, normalization="none")
    for row, shift in zip(c.values, k):
        np.testing.assert_allclose(row, np.roll(c.values[0], shift), atol=1e-8)
    assert c.axis == "theta"


def test_harmonic_spatial_carpet_rows_are_unit_gaussians(harmonic64, beam64):
    grid = SpatialGrid.uniform(12.0, 1024)
    t = np.linspace(0.0, 2 * np.pi, 13)
    c = carpet(harmonic64, beam64, "spatial", grid, t, normalization="none")
    for row, tj in zip(c.values, t):
        center = 4.0 * math.sqrt(2.0) * math.sin(tj)
        expected = np.exp(-((grid.points - center) ** 2)) / math.sqrt(math.pi)
        np.testing.assert_allclose(row, expected, atol=1e-10)


def test_carpet_rows_conserve_norm(weak128, beam128):
    t = np.linspace(0.0, 50.0, 101)
    spatial = carpet(weak128, beam128, "spatial", SpatialGrid.uniform(12.0, 512), t)
    phase = carpet(weak128, beam128, "phase", PhaseGrid(256), t)
    np.testing.assert_allclose(spatial.row_integrals, 1.0, atol=1e-8)
    np.testing.assert_allclose(phase.row_integrals, 1.0, atol=1e-8)
    assert spatial.meta["domain"] == "spatial"
    assert spatial.meta["n_max"] == 128


def test_carpet_normalization_modes(weak128, beam128):
    t = np.linspace(0.0, 30.0, 31)
    grid = PhaseGrid(256)
    frame = carpet(weak128, beam128, "phase", grid, t, normalization="frame")
    np.testing.assert_allclose(frame.values.max(axis=1), 1.0)
    whole = carpet(weak128, beam128, "phase", grid, t, normalization="global")
    assert whole.values.max() == 1.0
    raw = carpet(weak128, beam128, "phase", grid, t, normalization="none")
    np.testing.assert_allclose(whole.values, raw.values / raw.values.max())


def test_carpet_rejects_bad_arguments(harmonic64, beam64):
    t = [0.0, 1.0]
    with pytest.raises(ConfigurationError):
        carpet(harmonic64, beam64, "momentum", PhaseGrid(128), t)
    with pytest.raises(ConfigurationError):
        carpet(harmonic64, beam64, "phase", PhaseGrid(128), t, normalization="peak")
    with pytest.raises(ConfigurationError):
        carpet(harmonic64, beam64, "spatial", PhaseGrid(128), t)
    with pytest.raises(ConfigurationError):
        carpet(harmonic64, beam64, "phase", PhaseGrid(128), [1.0, 0.0])
    with pytest.raises(ConfigurationError, match="aliasing"):
        carpet(harmonic64, beam64, "phase", PhaseGrid(100), t)


def test_carpet_does_not_depend_on_thread_count(weak128, beam128):
    t = np.linspace(0.0, 100.0, 600)
    grid = PhaseGrid(256)
    serial = carpet(weak128, beam128, "phase", grid, t)
    pool = Runtime(threads=4)
    try:
        parallel = carpet(weak128, beam128, "phase", grid, t, mapper=pool.map)
    finally:
        pool.close()
    np.testing.assert_array_equal(parallel.values, serial.values)


def test_revival_windows():
    assert revival_windows(400.0, 25.0) == [(0.0, 25.0), (187.5, 212.5), (387.5, 412.5)]
