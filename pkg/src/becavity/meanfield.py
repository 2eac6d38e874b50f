"""Semiclassical (mean-field) dynamics, steady states, and bifurcation scan.

Works in scaled variables a = alpha/sqrt(N), b = beta/N, d = delta/N,
wS = w_S/N, wT = w_T/N, which makes the flow independent of the atom number.
Spin length conservation then reads wS^2 + |b|^2 = 1/4 (same for wT, d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .model import ModelParams, Phase, critical_coupling, phase_of

__all__ = [
    "MeanFieldState",
    "rhs",
    "integrate",
    "steady_states",
    "trivial_state",
    "jacobian",
    "bifurcation_scan",
    "BifurcationRow",
]


@dataclass(frozen=True)
class MeanFieldState:
    """Scaled semiclassical amplitudes of the cavity and the two spin ensembles."""

    a: complex
    b: complex
    d: complex
    wS: float
    wT: float

    def to_vector(self) -> np.ndarray:
        return np.array(
            [
                self.a.real, self.a.imag,
                self.b.real, self.b.imag,
                self.d.real, self.d.imag,
                self.wS, self.wT,
            ]
        )

    @classmethod
    def from_vector(cls, y: np.ndarray) -> "MeanFieldState":
        return cls(
            a=complex(y[0], y[1]),
            b=complex(y[2], y[3]),
            d=complex(y[4], y[5]),
            wS=float(y[6]),
            wT=float(y[7]),
        )

    def conservation_residuals(self) -> tuple[float, float]:
        """Deviations of wS^2 + |b|^2 and wT^2 + |d|^2 from 1/4."""
        return (
            self.wS**2 + abs(self.b) ** 2 - 0.25,
            self.wT**2 + abs(self.d) ** 2 - 0.25,
        )


def trivial_state() -> MeanFieldState:
    """Fully inverted configuration: all amplitudes zero, wS = wT = -1/2."""
    return MeanFieldState(0j, 0j, 0j, -0.5, -0.5)


def _flow(y: np.ndarray, p: ModelParams) -> np.ndarray:
    a1, a2, b1, b2, d1, d2, wS, wT = y
    g, wR, kap, Dlt = p.g, p.omega_R, p.kappa, p.delta
    return np.array(
        [
            -kap * a1 - Dlt * a2,
            Dlt * a1 - kap * a2 - 2 * g * (b1 + d1),
            wR * b2,
            -wR * b1 + 4 * g * a1 * wS,
            wR * d2,
            -wR * d1 + 4 * g * a1 * wT,
            -4 * g * a1 * b2,
            -4 * g * a1 * d2,
        ]
    )


def rhs(s: MeanFieldState, p: ModelParams) -> MeanFieldState:
    """Time derivative of the scaled mean-field state.

    da/dt = -(kappa - i Delta) a - i g (b + b* + d + d*)
    db/dt = -i omega_R b + 2 i g (a + a*) wS,   dwS/dt = i g (a + a*)(b - b*)
    and symmetrically for (d, wT).
    """
    y = _flow(s.to_vector(), p)
    return MeanFieldState.from_vector(y)


def jacobian(y: np.ndarray, p: ModelParams) -> np.ndarray:
    """8x8 Jacobian of the scaled flow in real coordinates."""
    a1, a2, b1, b2, d1, d2, wS, wT = y
    g, wR, kap, Dlt = p.g, p.omega_R, p.kappa, p.delta
    J = np.zeros((8, 8))
    J[0, 0], J[0, 1] = -kap, -Dlt
    J[1, 0], J[1, 1], J[1, 2], J[1, 4] = Dlt, -kap, -2 * g, -2 * g
    J[2, 3] = wR
    J[3, 2], J[3, 0], J[3, 6] = -wR, 4 * g * wS, 4 * g * a1
    J[4, 5] = wR
    J[5, 4], J[5, 0], J[5, 7] = -wR, 4 * g * wT, 4 * g * a1
    J[6, 0], J[6, 3] = -4 * g * b2, -4 * g * a1
    J[7, 0], J[7, 5] = -4 * g * d2, -4 * g * a1
    return J


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped mean-field states from the adaptive integration."""

    times: np.ndarray
    states: np.ndarray  # (n_times, 8) real coordinates

    def state(self, k: int) -> MeanFieldState:
        y = self.states[k]
        return MeanFieldState(
            a=complex(y[0], y[1]),
            b=complex(y[2], y[3]),
            d=complex(y[4], y[5]),
            wS=float(y[6]),
            wT=float(y[7]),
        )

    def conservation_drift(self) -> float:
        """Max deviation of the spin-length residuals from their initial values."""
        cS = self.states[:, 6] ** 2 + self.states[:, 2] ** 2 + self.states[:, 3] ** 2
        cT = self.states[:, 7] ** 2 + self.states[:, 4] ** 2 + self.states[:, 5] ** 2
        return float(
            max(np.max(np.abs(cS - cS[0])), np.max(np.abs(cT - cT[0])))
        )


def integrate(
    s0: MeanFieldState,
    p: ModelParams,
    t_end: float,
    tol: float = 1e-10,
    n_samples: int = 2000,
) -> Trajectory:
    """Adaptive integration of the scaled flow from ``s0`` up to ``t_end``."""
    if t_end <= 0:
        raise ValueError("t_end must be > 0")
    if not (1e-14 < tol < 1e-3):
        raise ValueError("tol must lie in (1e-14, 1e-3)")
    if abs(s0.wS) > 0.5 + 1e-9 or abs(s0.wT) > 0.5 + 1e-9:
        raise ValueError("initial inversions must satisfy |w| <= 1/2")
    t_eval = np.linspace(0.0, t_end, n_samples)
    sol = solve_ivp(
        lambda _, y: _flow(y, p),
        (0.0, t_end),
        s0.to_vector(),
        t_eval=t_eval,
        rtol=tol,
        atol=tol * 1e-2,
        method="DOP853",
    )
    if not sol.success:
        raise RuntimeError(f"mean-field integration failed: {sol.message}")
    return Trajectory(times=sol.t, states=sol.y.T)


def steady_states(p: ModelParams) -> list[tuple[MeanFieldState, bool]]:
    """Analytic fixed points with stability labels.

    Below (or at) threshold only the trivial inverted state is returned; above
    it the trivial state plus the two symmetry-broken branches.  Stability is
    read off the real part of the Jacobian spectrum at each point.
    """
    out = [trivial_state()]
    if phase_of(p) is Phase.SUPERRADIANT:
        gc = critical_coupling(p)
        mu = (gc / p.g) ** 2
        x = math.sqrt(1.0 - mu**2)
        a_plus = -2j * p.g * x / (p.kappa - 1j * p.delta)
        plus = MeanFieldState(a=a_plus, b=0.5 * x, d=0.5 * x, wS=-mu / 2, wT=-mu / 2)
        minus = MeanFieldState(a=-a_plus, b=-0.5 * x, d=-0.5 * x, wS=-mu / 2, wT=-mu / 2)
        out += [plus, minus]
    labeled = []
    for s in out:
        eig = np.linalg.eigvals(jacobian(s.to_vector(), p))
        labeled.append((s, bool(np.max(eig.real) < 1e-10)))
    return labeled


@dataclass(frozen=True)
class BifurcationRow:
    g: float
    g_over_gc: float
    abs_a: float
    wS: float
    branch: str
    stable: bool


def bifurcation_scan(p_base: ModelParams, g_grid) -> list[BifurcationRow]:
    """Steady-state order parameter and stability labels over a coupling grid."""
    g_grid = np.asarray(g_grid, dtype=float)
    if np.any(np.diff(g_grid) <= 0):
        raise ValueError("g_grid must be sorted ascending")
    rows = []
    for g in g_grid:
        p = ModelParams(
            delta=p_base.delta, g=float(g), omega_R=p_base.omega_R,
            kappa=p_base.kappa, n_atoms=p_base.n_atoms,
        )
        gc = critical_coupling(p)
        for s, stable in steady_states(p):
            branch = "trivial" if abs(s.a) == 0 else (
                "broken+" if s.b.real > 0 else "broken-"
            )
            rows.append(
                BifurcationRow(
                    g=float(g), g_over_gc=float(g / gc), abs_a=abs(s.a),
                    wS=s.wS, branch=branch, stable=stable,
                )
            )
    return rows
