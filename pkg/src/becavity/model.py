"""Physical parameters and quadratic-Hamiltonian builders.

Two driven atomic condensates inside a lossy cavity reduce, after
Holstein-Primakoff linearization around the mean field, to a small set of
coupled bosonic modes with a quadratic Hamiltonian and linear photon loss.
This module holds the parameter containers and assembles the quadrature-basis
Hamiltonian matrices for the normal phase, the superradiant phase, the
collective (p, q, s) basis, and the auxiliary-mode extension used for the
squeezing-based entanglement readout.

Conventions: x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)), hbar = 1,
vacuum covariance I/2, quadratures ordered (x1, p1, x2, p2, ...).  The
Hamiltonian is stored as the real symmetric matrix M with H = (1/2) r^T M r.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DomainError",
    "PhaseError",
    "Phase",
    "ModelParams",
    "AuxParams",
    "MicroParams",
    "PhaseCoefficients",
    "QuadraticModel",
    "critical_coupling",
    "closed_critical_coupling",
    "phase_of",
    "sr_coefficients",
    "normal_coefficients",
    "build_normal_hamiltonian",
    "build_sr_hamiltonian",
    "build_aux_hamiltonian",
    "build_collective_normal",
    "build_collective_sr",
    "collective_transform",
    "transform_model",
    "derive_couplings",
]

# relative half-width of the band treated as "at threshold"
_PHASE_EPS = 1e-9


class DomainError(ValueError):
    """Parameter combination outside the formula's domain (e.g. zero detuning)."""


class PhaseError(ValueError):
    """Operation requested in the wrong phase (e.g. superradiant builder below threshold)."""


class Phase(enum.Enum):
    NORMAL = "normal"
    CRITICAL = "critical"
    SUPERRADIANT = "superradiant"


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the two-ensemble cavity system.

    All rates/frequencies share the unit set by the recoil frequency
    ``omega_R`` (default 1).  ``delta`` is the signed cavity-pump detuning
    (figures of interest use negative values).  ``U`` is carried for
    completeness but must be zero; the Stark-shift dynamics is out of scope.
    """

    delta: float
    g: float
    omega_R: float = 1.0
    kappa: float = 0.05
    n_atoms: float = 1e5
    U: float = 0.0

    def __post_init__(self):
        if self.omega_R <= 0:
            raise ValueError(f"omega_R must be > 0, got {self.omega_R}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.n_atoms <= 0:
            raise ValueError(f"n_atoms must be > 0, got {self.n_atoms}")
        if self.U != 0.0:
            raise ValueError("nonzero Stark shift U is not supported (fixed U = 0)")


@dataclass(frozen=True)
class AuxParams:
    """Auxiliary readout mode: frequency, beam-splitter coupling to s, decay rate.

    ``omega_w=None`` means "resonant with the collective s mode"; the builder
    substitutes the s-mode frequency of the superradiant phase at hand.
    """

    gamma: float
    psi: float | None = None
    omega_w: float | None = None

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")


@dataclass(frozen=True)
class MicroParams:
    """Microscopic cavity-QED parameters behind the effective couplings."""

    g0: float
    Delta_a: float
    pump_amp: float
    U0: float

    def __post_init__(self):
        if self.Delta_a != 0 and abs(self.Delta_a) < 10 * abs(self.g0):
            warnings.warn(
                "dispersive regime marginal: |Delta_a| < 10*g0", stacklevel=2
            )

    @property
    def eta(self) -> float:
        """Two-photon scattering amplitude pump_amp * g0 / Delta_a."""
        if self.Delta_a == 0:
            raise DomainError("Delta_a = 0: dispersive elimination undefined")
        return self.pump_amp * self.g0 / self.Delta_a


@dataclass(frozen=True)
class PhaseCoefficients:
    """Coefficients of the linearized superradiant Hamiltonian."""

    mu: float
    Omega: float
    zeta: float
    phi: float
    omega_p: float
    omega_q: float


@dataclass(frozen=True)
class QuadraticModel:
    """n-mode quadratic Hamiltonian plus linear jump operators.

    ``h_matrix`` is the real symmetric 2n x 2n matrix M with H = (1/2) r^T M r
    over r = (x1, p1, ..., xn, pn).  Each jump is a pair (c, rate): ``c`` is a
    complex vector of length 2n holding the coefficients of
    (a_1, ..., a_n, a_1^dag, ..., a_n^dag) in the jump operator, and the
    dissipator enters the master equation as rate * (2 L rho L^dag - {L^dag L, rho}).
    ``jump_cross`` holds Hermitian off-diagonal rate-matrix entries (k, l, value)
    for cross dissipators 2 L_k rho L_l^dag - L_l^dag L_k rho - rho L_l^dag L_k.
    """

    labels: tuple[str, ...]
    h_matrix: np.ndarray
    jumps: tuple[tuple[np.ndarray, float], ...] = ()
    jump_cross: tuple[tuple[int, int, complex], ...] = ()

    def __post_init__(self):
        n = len(self.labels)
        M = np.asarray(self.h_matrix, dtype=float)
        if M.shape != (2 * n, 2 * n):
            raise ValueError(f"h_matrix shape {M.shape} != {(2 * n, 2 * n)}")
        if np.max(np.abs(M - M.T)) > 1e-12:
            raise ValueError("h_matrix not symmetric to 1e-12")
        for c, rate in self.jumps:
            if np.asarray(c).shape != (2 * n,):
                raise ValueError("jump coefficient vector has wrong length")
            if rate < 0:
                raise ValueError(f"jump rate must be >= 0, got {rate}")
        gamma = self.rate_matrix()
        if gamma.size:
            lo = np.linalg.eigvalsh(gamma).min()
            if lo < -1e-12:
                raise ValueError(f"jump rate matrix not PSD (min eig {lo:.3e})")

    @property
    def n_modes(self) -> int:
        return len(self.labels)

    def rate_matrix(self) -> np.ndarray:
        """Hermitian rate matrix over the listed jump operators."""
        k = len(self.jumps)
        gamma = np.zeros((k, k), dtype=complex)
        for i, (_, rate) in enumerate(self.jumps):
            gamma[i, i] = rate
        for i, j, val in self.jump_cross:
            gamma[i, j] += val
            gamma[j, i] += np.conj(val)
        return gamma

    def mode_index(self, label: str) -> int:
        return self.labels.index(label)


# ---------------------------------------------------------------------------
# scalar coefficient formulas


def critical_coupling(p: ModelParams) -> float:
    """Threshold coupling of the open two-ensemble system.

    g_c = sqrt(omega_R (Delta^2 + kappa^2)) / (2 sqrt(2) sqrt(|Delta|)).
    """
    if p.delta == 0:
        raise DomainError("delta = 0: critical coupling diverges")
    return math.sqrt(p.omega_R * (p.delta**2 + p.kappa**2)) / (
        2.0 * math.sqrt(2.0) * math.sqrt(abs(p.delta))
    )


def closed_critical_coupling(p: ModelParams) -> float:
    """Threshold sqrt(|Delta| omega_R)/2 of the lossless single-ensemble model."""
    if p.delta == 0:
        raise DomainError("delta = 0: critical coupling undefined")
    return math.sqrt(abs(p.delta) * p.omega_R) / 2.0


def phase_of(p: ModelParams) -> Phase:
    """Classify the coupling relative to threshold with a 1e-9 relative band."""
    gc = critical_coupling(p)
    if p.g < gc * (1.0 - _PHASE_EPS):
        return Phase.NORMAL
    if p.g > gc * (1.0 + _PHASE_EPS):
        return Phase.SUPERRADIANT
    return Phase.CRITICAL


def sr_coefficients(p: ModelParams) -> PhaseCoefficients:
    """Coefficients (mu, Omega, zeta, phi, omega_p, omega_q) above threshold."""
    gc = critical_coupling(p)
    if p.g < gc * (1.0 - _PHASE_EPS):
        raise PhaseError(f"g = {p.g} below threshold g_c = {gc}")
    mu = min((gc / p.g) ** 2, 1.0)
    wR = p.omega_R
    Omega = wR * (1 + mu) / (2 * mu) + wR * (1 - mu) * (3 + mu) / (4 * mu * (1 + mu))
    zeta = wR * (1 - mu) * (3 + mu) / (8 * mu * (1 + mu))
    phi = p.g * mu * math.sqrt(2.0 / (1 + mu))
    omega_p = (Omega - p.delta) / 2 + math.sqrt(2.0) * phi
    omega_q = (Omega - p.delta) / 2 - math.sqrt(2.0) * phi
    return PhaseCoefficients(mu, Omega, zeta, phi, omega_p, omega_q)


def normal_coefficients(p: ModelParams) -> tuple[float, float, float]:
    """Collective-basis coefficients (omega_p~, omega_q~, g~) of the normal phase."""
    wp = (p.omega_R - p.delta) / 2 + math.sqrt(2.0) * p.g
    wq = (p.omega_R - p.delta) / 2 - math.sqrt(2.0) * p.g
    gt = (p.omega_R + p.delta) / 2
    return wp, wq, gt


def derive_couplings(m: MicroParams, n_atoms: float) -> tuple[float, float]:
    """Effective coupling g = sqrt(2N) eta and Stark shift U = N U0 / 4."""
    if n_atoms <= 0:
        raise ValueError("n_atoms must be > 0")
    g = math.sqrt(2.0 * n_atoms) * m.eta
    U = n_atoms * m.U0 / 4.0
    return g, U


# ---------------------------------------------------------------------------
# quadrature-matrix assembly helpers

def _add_number(M, j, w):
    # w a^dag a = (w/2)(x^2 + p^2) up to a constant
    M[2 * j, 2 * j] += w
    M[2 * j + 1, 2 * j + 1] += w


def _add_single_squeeze(M, j, z):
    # z (a^2 + a^dag^2) = z (x^2 - p^2)
    M[2 * j, 2 * j] += 2 * z
    M[2 * j + 1, 2 * j + 1] -= 2 * z


def _add_position_coupling(M, i, j, c):
    # c x_i x_j; (1/2) r^T M r sums both orderings, so each entry carries c
    M[2 * i, 2 * j] += c
    M[2 * j, 2 * i] += c


def _add_beam_splitter(M, i, j, t):
    # t (a_i^dag a_j + a_j^dag a_i) = t (x_i x_j + p_i p_j)
    M[2 * i, 2 * j] += t
    M[2 * j, 2 * i] += t
    M[2 * i + 1, 2 * j + 1] += t
    M[2 * j + 1, 2 * i + 1] += t


def _add_two_mode_squeeze(M, i, j, z):
    # z (a_i a_j + a_i^dag a_j^dag) = z (x_i x_j - p_i p_j)
    M[2 * i, 2 * j] += z
    M[2 * j, 2 * i] += z
    M[2 * i + 1, 2 * j + 1] -= z
    M[2 * j + 1, 2 * i + 1] -= z


def _annihilation(n: int, j: int) -> np.ndarray:
    c = np.zeros(2 * n, dtype=complex)
    c[j] = 1.0
    return c


# ---------------------------------------------------------------------------
# Hamiltonian builders


def build_normal_hamiltonian(p: ModelParams) -> QuadraticModel:
    """Linearized normal-phase Hamiltonian over modes (a, b, c) with cavity loss.

    H = -Delta a^dag a + omega_R (b^dag b + c^dag c)
        + g (a^dag + a)(b^dag + b + c^dag + c)
    """
    M = np.zeros((6, 6))
    _add_number(M, 0, -p.delta)
    _add_number(M, 1, p.omega_R)
    _add_number(M, 2, p.omega_R)
    _add_position_coupling(M, 0, 1, 2 * p.g)
    _add_position_coupling(M, 0, 2, 2 * p.g)
    jumps = ((_annihilation(3, 0), p.kappa),)
    return QuadraticModel(("a", "b", "c"), M, jumps)


def build_sr_hamiltonian(p: ModelParams) -> QuadraticModel:
    """Linearized superradiant-phase Hamiltonian over (a, b, c) with cavity loss.

    Same structure as the normal phase but with atomic frequency Omega,
    single-mode squeezing zeta on b and c, and coupling phi.
    """
    co = sr_coefficients(p)
    M = np.zeros((6, 6))
    _add_number(M, 0, -p.delta)
    _add_number(M, 1, co.Omega)
    _add_number(M, 2, co.Omega)
    _add_single_squeeze(M, 1, co.zeta)
    _add_single_squeeze(M, 2, co.zeta)
    _add_position_coupling(M, 0, 1, 2 * co.phi)
    _add_position_coupling(M, 0, 2, 2 * co.phi)
    jumps = ((_annihilation(3, 0), p.kappa),)
    return QuadraticModel(("a", "b", "c"), M, jumps)


def build_aux_hamiltonian(p: ModelParams, aux: AuxParams) -> QuadraticModel:
    """Superradiant model extended by the auxiliary w mode over (a, b, c, w).

    The w mode couples to s = (b - c)/sqrt(2) through the passive interaction
    Psi (s^dag w + w^dag s) and decays at rate gamma.  Defaults: Psi =
    0.1 omega_R and w resonant with the s mode (omega_w = Omega).
    """
    co = sr_coefficients(p)
    psi = 0.1 * p.omega_R if aux.psi is None else aux.psi
    omega_w = co.Omega if aux.omega_w is None else aux.omega_w
    M = np.zeros((8, 8))
    _add_number(M, 0, -p.delta)
    _add_number(M, 1, co.Omega)
    _add_number(M, 2, co.Omega)
    _add_single_squeeze(M, 1, co.zeta)
    _add_single_squeeze(M, 2, co.zeta)
    _add_position_coupling(M, 0, 1, 2 * co.phi)
    _add_position_coupling(M, 0, 2, 2 * co.phi)
    _add_number(M, 3, omega_w)
    # Psi (s^dag w + h.c.) with s = (b - c)/sqrt(2)
    _add_beam_splitter(M, 1, 3, psi / math.sqrt(2.0))
    _add_beam_splitter(M, 2, 3, -psi / math.sqrt(2.0))
    jumps = (
        (_annihilation(4, 0), p.kappa),
        (_annihilation(4, 3), aux.gamma),
    )
    return QuadraticModel(("a", "b", "c", "w"), M, jumps)


def collective_transform(n_modes: int = 3) -> np.ndarray:
    """Orthogonal mode-mixing matrix (p, q, s) = O (a, b, c).

    p = (b + c)/2 + a/sqrt(2), q = (b + c)/2 - a/sqrt(2), s = (b - c)/sqrt(2).
    For ``n_modes=4`` the auxiliary w mode is passed through unchanged.
    The inverse is the transpose.
    """
    r2 = 1.0 / math.sqrt(2.0)
    O3 = np.array(
        [
            [r2, 0.5, 0.5],
            [-r2, 0.5, 0.5],
            [0.0, r2, -r2],
        ]
    )
    if n_modes == 3:
        return O3
    if n_modes == 4:
        O = np.eye(4)
        O[:3, :3] = O3
        return O
    raise ValueError("collective transform defined for 3 or 4 modes")


def transform_model(
    model: QuadraticModel, O: np.ndarray, labels: tuple[str, ...]
) -> QuadraticModel:
    """Re-express a model in mixed modes b_k = sum_j O_kj a_j (O real orthogonal)."""
    O = np.asarray(O, dtype=float)
    n = model.n_modes
    if O.shape != (n, n) or np.max(np.abs(O @ O.T - np.eye(n))) > 1e-12:
        raise ValueError("mixing matrix must be real orthogonal")
    S = np.zeros((2 * n, 2 * n))
    S[0::2, 0::2] = O
    S[1::2, 1::2] = O
    M_new = S @ model.h_matrix @ S.T
    M_new = 0.5 * (M_new + M_new.T)
    jumps = []
    for c, rate in model.jumps:
        c_new = np.concatenate([O @ c[:n], O @ c[n:]])
        jumps.append((c_new, rate))
    return QuadraticModel(labels, M_new, tuple(jumps), model.jump_cross)


def build_collective_normal(p: ModelParams) -> QuadraticModel:
    """Normal-phase Hamiltonian written directly in the (p, q, s) basis.

    Includes the collective-basis loss structure: half-rate dissipators on p
    and q plus the two negative cross terms, together equivalent to the single
    cavity dissipator.
    """
    wp, wq, gt = normal_coefficients(p)
    M = np.zeros((6, 6))
    _add_number(M, 0, wp)
    _add_number(M, 1, wq)
    _add_number(M, 2, p.omega_R)
    _add_beam_splitter(M, 0, 1, gt)
    _add_single_squeeze(M, 0, p.g / math.sqrt(2.0))
    _add_single_squeeze(M, 1, -p.g / math.sqrt(2.0))
    return QuadraticModel(("p", "q", "s"), M, _collective_jumps(3, p.kappa),
                          _collective_cross(p.kappa))


def build_collective_sr(p: ModelParams) -> QuadraticModel:
    """Superradiant Hamiltonian written directly in the (p, q, s) basis."""
    co = sr_coefficients(p)
    M = np.zeros((6, 6))
    _add_number(M, 0, co.omega_p)
    _add_number(M, 1, co.omega_q)
    _add_number(M, 2, co.Omega)
    _add_beam_splitter(M, 0, 1, (co.Omega + p.delta) / 2)
    _add_two_mode_squeeze(M, 0, 1, co.zeta)
    _add_single_squeeze(M, 2, co.zeta)
    _add_single_squeeze(M, 0, co.zeta / 2 + co.phi / math.sqrt(2.0))
    _add_single_squeeze(M, 1, co.zeta / 2 - co.phi / math.sqrt(2.0))
    return QuadraticModel(("p", "q", "s"), M, _collective_jumps(3, p.kappa),
                          _collective_cross(p.kappa))


def _collective_jumps(n: int, kappa: float):
    return (
        (_annihilation(n, 0), kappa / 2),
        (_annihilation(n, 1), kappa / 2),
    )


def _collective_cross(kappa: float):
    # cross dissipators between p and q carry rate -kappa/2 each;
    # the (q, p) entry follows from Hermitian completion in rate_matrix
    return ((0, 1, -kappa / 2),)
