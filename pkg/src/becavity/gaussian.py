"""Gaussian-state engine: moment dynamics, steady states, entanglement measures.

The master equation with a quadratic Hamiltonian and linear jump operators
closes on first and second moments.  With r = (x1, p1, ..., xn, pn),
H = (1/2) r^T M r, jump operators L_k = u_k . r and Hermitian PSD rate matrix
Gamma (dissipator sum_kl Gamma_kl (2 L_k rho L_l^dag - L_l^dag L_k rho -
rho L_l^dag L_k)), the moments obey

    d<r>/dt   = A <r>,          A = Omega_s (M + 2 Im Theta),
    d sigma/dt = A sigma + sigma A^T + D,   D = 2 Omega_s Re(Theta) Omega_s^T,

with Theta = sum_kl Gamma_kl conj(u_l) u_k^T.  These replace the
characteristic-function route and are validated against a truncated-Fock
integrator (see :mod:`becavity.fock`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm, solve_continuous_lyapunov

from .model import QuadraticModel

__all__ = [
    "GaussianState",
    "DriftDiffusion",
    "MarginalStabilityError",
    "symplectic_form",
    "drift_diffusion",
    "evolve",
    "propagate_uniform",
    "lyapunov_steady",
    "mode_transform",
    "reduce",
    "symplectic_eigenvalues",
    "log_negativity",
    "squeezing",
    "occupancy",
    "ladder_correlators",
]


class MarginalStabilityError(RuntimeError):
    """Drift matrix is not strictly Hurwitz; no unique Lyapunov steady state."""


def symplectic_form(n: int) -> np.ndarray:
    """Block-diagonal symplectic form with [x, p] = i per mode."""
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n), J)


@dataclass(frozen=True)
class GaussianState:
    """First moments and symmetrized covariance matrix of n bosonic modes."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape != (mean.size, mean.size) or mean.size % 2:
            raise ValueError("inconsistent moment dimensions")
        if np.max(np.abs(cov - cov.T)) > 1e-12:
            raise ValueError("covariance not symmetric to 1e-12")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    @classmethod
    def vacuum(cls, n_modes: int) -> "GaussianState":
        return cls(np.zeros(2 * n_modes), 0.5 * np.eye(2 * n_modes))

    def physicality(self) -> float:
        """Min eigenvalue of sigma + i Omega_s / 2; >= -1e-9 for physical states."""
        Om = symplectic_form(self.n_modes)
        w = np.linalg.eigvalsh(self.cov + 0.5j * Om)
        return float(w.min())


@dataclass(frozen=True)
class DriftDiffusion:
    """Drift matrix A and diffusion matrix D of the moment flow."""

    A: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        D = np.asarray(self.D, dtype=float)
        if A.shape != D.shape or A.shape[0] != A.shape[1]:
            raise ValueError("A and D must be square matrices of equal size")
        if np.max(np.abs(D - D.T)) > 1e-12:
            raise ValueError("D not symmetric")
        lo = np.linalg.eigvalsh(D).min() if D.size else 0.0
        if lo < -1e-12:
            raise ValueError(f"D not PSD (min eig {lo:.3e})")

    @property
    def n_modes(self) -> int:
        return self.A.shape[0] // 2


def _ladder_to_quadrature(c: np.ndarray) -> np.ndarray:
    """Quadrature coefficients of L = sum_j u_j a_j + v_j a_j^dag."""
    n = c.size // 2
    u, v = c[:n], c[n:]
    q = np.zeros(2 * n, dtype=complex)
    q[0::2] = (u + v) / math.sqrt(2.0)
    q[1::2] = 1j * (u - v) / math.sqrt(2.0)
    return q


def drift_diffusion(m: QuadraticModel) -> DriftDiffusion:
    """Drift and diffusion matrices of the moment flow of a quadratic model."""
    n = m.n_modes
    Om = symplectic_form(n)
    gamma = m.rate_matrix()
    theta = np.zeros((2 * n, 2 * n), dtype=complex)
    qvecs = [_ladder_to_quadrature(np.asarray(c, dtype=complex)) for c, _ in m.jumps]
    for k, uk in enumerate(qvecs):
        for l, ul in enumerate(qvecs):
            if gamma[k, l] != 0:
                theta += gamma[k, l] * np.outer(np.conj(ul), uk)
    A = Om @ (m.h_matrix + 2.0 * np.imag(theta))
    D = 2.0 * Om @ np.real(theta) @ Om.T
    D = 0.5 * (D + D.T)
    return DriftDiffusion(A, D)


def evolve(
    s0: GaussianState,
    dd: DriftDiffusion,
    t_grid: np.ndarray,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> list[GaussianState]:
    """Integrate the moment equations, sampling at the (ascending) times in t_grid."""
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly ascending")
    d = s0.mean.size
    A, D = dd.A, dd.D

    def rhs(_, y):
        mean = y[:d]
        cov = y[d:].reshape(d, d)
        dcov = A @ cov + cov @ A.T + D
        return np.concatenate([A @ mean, dcov.ravel()])

    y0 = np.concatenate([s0.mean, s0.cov.ravel()])
    t0 = min(0.0, t_grid[0])
    sol = solve_ivp(
        rhs, (t0, t_grid[-1]), y0, t_eval=t_grid, rtol=rtol, atol=atol,
        method="DOP853",
    )
    if not sol.success:
        raise RuntimeError(f"moment integration failed: {sol.message}")
    out = []
    for k in range(t_grid.size):
        mean = sol.y[:d, k]
        cov = sol.y[d:, k].reshape(d, d)
        out.append(GaussianState(mean, 0.5 * (cov + cov.T)))
    return out


def propagate_uniform(
    s0: GaussianState, dd: DriftDiffusion, dt: float, n_steps: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact stepping of the moment equations on a uniform time grid.

    Uses the matrix-exponential (van Loan) discretization: per step
    sigma <- F sigma F^T + Q with F = exp(A dt) and Q the exact process-noise
    integral.  Returns (times, means, covs) including the initial point.
    """
    d = s0.mean.size
    blk = np.zeros((2 * d, 2 * d))
    blk[:d, :d] = -dd.A
    blk[:d, d:] = dd.D
    blk[d:, d:] = dd.A.T
    eblk = expm(blk * dt)
    F = eblk[d:, d:].T
    Q = F @ eblk[:d, d:]
    Q = 0.5 * (Q + Q.T)

    times = dt * np.arange(n_steps + 1)
    means = np.empty((n_steps + 1, d))
    covs = np.empty((n_steps + 1, d, d))
    mean, cov = s0.mean.copy(), s0.cov.copy()
    means[0], covs[0] = mean, cov
    for k in range(1, n_steps + 1):
        mean = F @ mean
        cov = F @ cov @ F.T + Q
        cov = 0.5 * (cov + cov.T)
        means[k], covs[k] = mean, cov
    return times, means, covs


def lyapunov_steady(dd: DriftDiffusion, hurwitz_tol: float = 1e-12) -> np.ndarray:
    """Steady covariance solving A sigma + sigma A^T + D = 0 for Hurwitz A."""
    eig = np.linalg.eigvals(dd.A)
    if np.max(eig.real) >= -hurwitz_tol:
        raise MarginalStabilityError(
            f"drift not strictly Hurwitz (max Re eig = {np.max(eig.real):.3e})"
        )
    sigma = solve_continuous_lyapunov(dd.A, -dd.D)
    sigma = 0.5 * (sigma + sigma.T)
    resid = np.linalg.norm(dd.A @ sigma + sigma @ dd.A.T + dd.D)
    if resid > 1e-10 * max(1.0, np.linalg.norm(sigma)):
        raise RuntimeError(f"Lyapunov residual too large: {resid:.3e}")
    return sigma


def mode_transform(s: GaussianState, O: np.ndarray) -> GaussianState:
    """Apply a real orthogonal mode mixing b_k = sum_j O_kj a_j to a state."""
    O = np.asarray(O, dtype=float)
    n = s.n_modes
    if O.shape != (n, n) or np.max(np.abs(O @ O.T - np.eye(n))) > 1e-10:
        raise ValueError("mixing matrix must be real orthogonal")
    S = np.zeros((2 * n, 2 * n))
    S[0::2, 0::2] = O
    S[1::2, 1::2] = O
    cov = S @ s.cov @ S.T
    return GaussianState(S @ s.mean, 0.5 * (cov + cov.T))


def reduce(s: GaussianState, modes) -> GaussianState:
    """Marginal Gaussian state of the given mode subset (order preserved)."""
    modes = list(modes)
    if not modes:
        raise ValueError("mode subset must be nonempty")
    if any(m < 0 or m >= s.n_modes for m in modes):
        raise IndexError(f"mode index out of range for {s.n_modes} modes")
    idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes])
    return GaussianState(s.mean[idx], s.cov[np.ix_(idx, idx)])


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, ascending (n values)."""
    cov = np.asarray(cov, dtype=float)
    if np.max(np.abs(cov - cov.T)) > 1e-10:
        raise ValueError("covariance must be symmetric")
    n = cov.shape[0] // 2
    w = np.linalg.eigvals(1j * symplectic_form(n) @ cov)
    nu = np.sort(np.abs(w))
    return nu[::2].copy()  # spectrum comes in +/- pairs


def log_negativity(s: GaussianState, partition) -> float:
    """Logarithmic negativity N = max(0, -ln 2 nu~_min) across a bipartition.

    ``partition`` is a pair of disjoint mode-index collections.  If their union
    does not cover all modes of ``s`` the state is first reduced to the union.
    The partial transpose is the momentum-sign flip on the second collection.
    """
    part_a, part_b = (list(p) for p in partition)
    if set(part_a) & set(part_b):
        raise ValueError("partitions overlap")
    sub = reduce(s, part_a + part_b)
    flip = np.ones(2 * sub.n_modes)
    for k in range(len(part_a), sub.n_modes):
        flip[2 * k + 1] = -1.0
    cov_pt = sub.cov * np.outer(flip, flip)
    nu_min = symplectic_eigenvalues(cov_pt)[0]
    return max(0.0, -math.log(2.0 * nu_min))


def squeezing(s: GaussianState, mode: int) -> float:
    """Single-mode squeezing S = max(0, -ln 2 V_min) of one mode's marginal."""
    sub = reduce(s, [mode])
    v_min = np.linalg.eigvalsh(sub.cov).min()
    return max(0.0, -math.log(2.0 * v_min))


def occupancy(s: GaussianState, mode: int) -> float:
    """Expectation <a^dag a> of one mode."""
    sub = reduce(s, [mode])
    return float(
        0.5 * (sub.cov[0, 0] + sub.cov[1, 1] - 1.0)
        + 0.5 * (sub.mean[0] ** 2 + sub.mean[1] ** 2)
    )


def ladder_correlators(s: GaussianState, mode: int) -> tuple[float, complex]:
    """(<a^dag a>, <a^dag^2>) of one mode, for zero-mean states."""
    sub = reduce(s, [mode])
    sxx, spp, sxp = sub.cov[0, 0], sub.cov[1, 1], sub.cov[0, 1]
    n_occ = 0.5 * (sxx + spp - 1.0)
    adag2 = 0.5 * (sxx - spp) - 1j * sxp
    return n_occ, adag2
