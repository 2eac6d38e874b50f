"""Driven-dissipative Gaussian dynamics of two condensates in a lossy cavity."""

from .model import (
    AuxParams,
    DomainError,
    MicroParams,
    ModelParams,
    Phase,
    PhaseCoefficients,
    PhaseError,
    QuadraticModel,
    build_aux_hamiltonian,
    build_collective_normal,
    build_collective_sr,
    build_normal_hamiltonian,
    build_sr_hamiltonian,
    closed_critical_coupling,
    collective_transform,
    critical_coupling,
    derive_couplings,
    normal_coefficients,
    phase_of,
    sr_coefficients,
    transform_model,
)
from .gaussian import (
    DriftDiffusion,
    GaussianState,
    MarginalStabilityError,
    drift_diffusion,
    evolve,
    ladder_correlators,
    log_negativity,
    lyapunov_steady,
    mode_transform,
    occupancy,
    propagate_uniform,
    reduce,
    squeezing,
    symplectic_eigenvalues,
    symplectic_form,
)
from .fock import FockMoments, fock_oracle
from .experiments import (
    InferenceResult,
    NegativityTrace,
    SweepResult,
    critical_detuning,
    esd_trace,
    inference_scan,
    negativity_series,
    phase_model,
    s_mode_analytic,
    s_sector_frequency,
    stroboscopic_map,
    time_averaged_sweep,
)
from .meanfield import (
    BifurcationRow,
    MeanFieldState,
    bifurcation_scan,
    integrate,
    jacobian,
    rhs,
    steady_states,
    trivial_state,
)

__version__ = "0.1.0"
