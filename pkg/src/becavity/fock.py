"""Brute-force master-equation integrator in a truncated number basis.

Validation oracle for the Gaussian moment engine: integrates the same
Lindblad dynamics as :func:`becavity.gaussian.drift_diffusion` +
:func:`becavity.gaussian.evolve`, but in a truncated Fock space with dense
matrices and no Gaussian assumption.  Only practical for small mode counts
and cutoffs; a truncation-leak check flags unreliable results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce as _reduce

import numpy as np
from scipy.integrate import solve_ivp

from .model import QuadraticModel

__all__ = ["FockMoments", "fock_oracle"]

_MAX_DIM = 10_000
_LEAK_THRESHOLD = 1e-6


@dataclass(frozen=True)
class FockMoments:
    """Quadrature moments over time from the truncated-Fock integration."""

    times: np.ndarray
    means: np.ndarray  # (n_times, 2n)
    covs: np.ndarray   # (n_times, 2n, 2n), symmetrized central second moments
    leak: np.ndarray   # (n_times,) population in the top Fock level of any mode
    reliable: bool     # False if leak ever exceeded the truncation threshold


def _destroy(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1)


def _embed(op: np.ndarray, mode: int, n_modes: int, cutoff: int) -> np.ndarray:
    mats = [np.eye(cutoff)] * n_modes
    mats[mode] = op
    return _reduce(np.kron, mats)


def fock_oracle(
    m: QuadraticModel,
    cutoff: int,
    t_grid: np.ndarray,
    rtol: float = 1e-8,
    atol: float = 1e-10,
) -> FockMoments:
    """Integrate the master equation of ``m`` from vacuum in a truncated basis."""
    n = m.n_modes
    dim = cutoff**n
    if dim > _MAX_DIM:
        raise ValueError(f"Hilbert dimension {dim} exceeds {_MAX_DIM}")
    t_grid = np.asarray(t_grid, dtype=float)

    ann = [_embed(_destroy(cutoff), j, n, cutoff) for j in range(n)]
    # quadrature operators, interleaved (x1, p1, ...)
    R = []
    for a in ann:
        R.append((a + a.conj().T) / math.sqrt(2.0))
        R.append((a - a.conj().T) / (1j * math.sqrt(2.0)))

    H = np.zeros((dim, dim), dtype=complex)
    M = m.h_matrix
    for i in range(2 * n):
        for j in range(2 * n):
            if M[i, j] != 0:
                H += 0.5 * M[i, j] * (R[i] @ R[j])

    # jump operators combined through the Hermitian PSD rate matrix
    gamma = m.rate_matrix()
    raw = []
    for c, _ in m.jumps:
        c = np.asarray(c, dtype=complex)
        L = np.zeros((dim, dim), dtype=complex)
        for j in range(n):
            if c[j] != 0:
                L += c[j] * ann[j]
            if c[n + j] != 0:
                L += c[n + j] * ann[j].conj().T
        raw.append(L)
    lam, V = (np.linalg.eigh(gamma) if raw else (np.zeros(0), np.zeros((0, 0))))
    jump_ops = []
    for k in range(len(raw)):
        if lam[k] > 1e-14:
            J = sum(V[i, k] * raw[i] for i in range(len(raw)))
            jump_ops.append((lam[k], J))

    K = -1j * H
    for rate, J in jump_ops:
        K = K - rate * (J.conj().T @ J)
    pairs = [(2.0 * rate, J, J.conj().T) for rate, J in jump_ops]

    def rhs(_, y):
        rho = y.view(complex).reshape(dim, dim)
        drho = K @ rho + rho @ K.conj().T
        for two_rate, J, Jd in pairs:
            drho += two_rate * (J @ rho @ Jd)
        return drho.ravel().view(float)

    rho0 = np.zeros((dim, dim), dtype=complex)
    rho0[0, 0] = 1.0
    sol = solve_ivp(
        rhs, (min(0.0, t_grid[0]), t_grid[-1]), rho0.ravel().view(float),
        t_eval=t_grid, rtol=rtol, atol=atol, method="DOP853",
    )
    if not sol.success:
        raise RuntimeError(f"Fock integration failed: {sol.message}")

    # projector onto "any mode at the top Fock level"
    top = np.zeros(dim)
    idx = np.arange(dim)
    for j in range(n):
        level = (idx // cutoff ** (n - 1 - j)) % cutoff
        top = np.maximum(top, (level == cutoff - 1).astype(float))

    n_t = t_grid.size
    means = np.empty((n_t, 2 * n))
    covs = np.empty((n_t, 2 * n, 2 * n))
    leak = np.empty(n_t)
    for k in range(n_t):
        rho = np.ascontiguousarray(sol.y[:, k]).view(complex).reshape(dim, dim)
        rho = 0.5 * (rho + rho.conj().T)
        leak[k] = float(np.real(np.diag(rho)) @ top)
        mu = np.array([np.real(np.trace(r @ rho)) for r in R])
        cov = np.empty((2 * n, 2 * n))
        for i in range(2 * n):
            for j in range(i, 2 * n):
                sym = 0.5 * np.real(np.trace((R[i] @ R[j] + R[j] @ R[i]) @ rho))
                cov[i, j] = cov[j, i] = sym - mu[i] * mu[j]
        means[k], covs[k] = mu, cov
    return FockMoments(
        times=t_grid, means=means, covs=covs, leak=leak,
        reliable=bool(np.all(leak <= _LEAK_THRESHOLD)),
    )
