from ._common import (
    ConfigError,
    ConfigurationError,
    ConvergenceError,
    DomainError,
    NumericError,
    OutputError,
    SimulationError,
    TruncationError,
    align_global_phase,
)
from .fock_operators import (
    SymmetricBandMatrix,
    TruncationSpec,
    build_hamiltonian,
    build_number,
    build_position,
    build_quartic,
)
from .spectral import (
    EigenDecomposition,
    ModeProfiles,
    SpectrumSweep,
    converge_spectrum,
    diagonalize,
    jacobi_eigh,
    mode_profiles,
    residuals,
    spectrum_sweep,
)
from .projections import (
    ComplexField,
    PhaseGrid,
    SpatialGrid,
    analytic_extension,
    fourier_coefficients,
    hermite_gauss,
    hilbert_imaginary,
    hilbert_partner,
    phase_moment,
    rotate,
    to_phase,
    to_phase_direct,
    to_spatial,
)
from .propagation import (
    Carpet,
    ObservableSeries,
    StateVector,
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
from .dispersive import (
    DispersiveCoefficients,
    dispersive_coefficients,
    evolve_dispersive,
    fidelity,
    fidelity_series,
)
from .talbot_analysis import (
    RevivalReport,
    detect_revival,
    envelope,
    fractional_revival_times,
    talbot_length,
)

__all__ = [
    "ConfigError",
    "ConfigurationError",
    "ConvergenceError",
    "DomainError",
    "NumericError",
    "OutputError",
    "SimulationError",
    "TruncationError",
    "align_global_phase",
    "SymmetricBandMatrix",
    "TruncationSpec",
    "build_hamiltonian",
    "build_number",
    "build_position",
    "build_quartic",
    "EigenDecomposition",
    "ModeProfiles",
    "SpectrumSweep",
    "converge_spectrum",
    "diagonalize",
    "jacobi_eigh",
    "mode_profiles",
    "residuals",
    "spectrum_sweep",
    "ComplexField",
    "PhaseGrid",
    "SpatialGrid",
    "analytic_extension",
    "fourier_coefficients",
    "hermite_gauss",
    "hilbert_imaginary",
    "hilbert_partner",
    "phase_moment",
    "rotate",
    "to_phase",
    "to_phase_direct",
    "to_spatial",
    "Carpet",
    "ObservableSeries",
    "StateVector",
    "carpet",
    "coherent_state",
    "energy_expectation",
    "evolve",
    "evolve_many",
    "fock_state",
    "mean_mode_number",
    "position_expectation",
    "position_series",
    "revival_windows",
    "DispersiveCoefficients",
    "dispersive_coefficients",
    "evolve_dispersive",
    "fidelity",
    "fidelity_series",
    "RevivalReport",
    "detect_revival",
    "envelope",
    "fractional_revival_times",
    "talbot_length",
]
