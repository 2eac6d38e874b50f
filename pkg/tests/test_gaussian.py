import math

import numpy as np
import pytest

from becavity import gaussian
from becavity.gaussian import (
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
from becavity.model import (
    ModelParams,
    QuadraticModel,
    build_collective_sr,
    build_normal_hamiltonian,
    build_sr_hamiltonian,
    critical_coupling,
)


def single_mode(omega=1.0, kappa=0.2):
    M = omega * np.eye(2)
    jumps = ((np.array([1.0, 0.0], dtype=complex), kappa),)
    return QuadraticModel(("a",), M, jumps)


def tmsv(r):
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    cov = 0.5 * np.block(
        [[c * np.eye(2), s * np.diag([1.0, -1.0])],
         [s * np.diag([1.0, -1.0]), c * np.eye(2)]]
    )
    return GaussianState(np.zeros(4), cov)


class TestState:
    def test_vacuum(self):
        v = GaussianState.vacuum(3)
        np.testing.assert_allclose(v.cov, 0.5 * np.eye(6))
        assert v.physicality() == pytest.approx(0.0, abs=1e-14)

    def test_rejects_asymmetric_cov(self):
        cov = 0.5 * np.eye(2)
        cov[0, 1] = 1e-6
        with pytest.raises(ValueError):
            GaussianState(np.zeros(2), cov)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            GaussianState(np.zeros(3), 0.5 * np.eye(3))

    def test_unphysical_detected(self):
        s = GaussianState(np.zeros(2), 0.1 * np.eye(2))
        assert s.physicality() < -1e-3

    def test_symplectic_form(self):
        Om = symplectic_form(2)
        np.testing.assert_allclose(Om.T, -Om)
        np.testing.assert_allclose(Om @ Om, -np.eye(4))


class TestSpectraAndMeasures:
    def test_vacuum_symplectic_spectrum(self):
        nu = symplectic_eigenvalues(0.5 * np.eye(6))
        np.testing.assert_allclose(nu, [0.5, 0.5, 0.5])

    def test_thermal_spectrum(self):
        n = 1.7
        nu = symplectic_eigenvalues((n + 0.5) * np.eye(2))
        np.testing.assert_allclose(nu, [n + 0.5])

    def test_tmsv_negativity(self):
        # N = 2r in natural log for the two-mode squeezed vacuum
        for r in (0.3, 1.0):
            s = tmsv(r)
            assert log_negativity(s, ([0], [1])) == pytest.approx(2 * r, rel=1e-12)
            # the state itself is pure: symplectic spectrum all 1/2
            np.testing.assert_allclose(
                symplectic_eigenvalues(s.cov), [0.5, 0.5], atol=1e-12
            )

    def test_negativity_clamped_at_separable(self):
        v = GaussianState.vacuum(2)
        assert log_negativity(v, ([0], [1])) == 0.0

    def test_negativity_partition_checks(self):
        v = GaussianState.vacuum(3)
        with pytest.raises(ValueError):
            log_negativity(v, ([0, 1], [1, 2]))
        # union smaller than the state: reduce first
        s = tmsv(0.5)
        big = GaussianState(
            np.zeros(6),
            np.block(
                [[s.cov, np.zeros((4, 2))], [np.zeros((2, 4)), 0.5 * np.eye(2)]]
            ),
        )
        assert log_negativity(big, ([0], [1])) == pytest.approx(1.0, rel=1e-12)

    def test_single_mode_squeezing(self):
        r = 0.4
        cov = 0.5 * np.diag([math.exp(-2 * r), math.exp(2 * r)])
        s = GaussianState(np.zeros(2), cov)
        assert squeezing(s, 0) == pytest.approx(2 * r, rel=1e-12)
        assert squeezing(GaussianState.vacuum(1), 0) == 0.0

    def test_occupancy_and_correlators(self):
        n = 2.5
        th = GaussianState(np.zeros(2), (n + 0.5) * np.eye(2))
        assert occupancy(th, 0) == pytest.approx(n, rel=1e-12)
        occ, adag2 = ladder_correlators(th, 0)
        assert occ == pytest.approx(n, rel=1e-12)
        assert adag2 == pytest.approx(0.0, abs=1e-12)

    def test_occupancy_with_displacement(self):
        alpha = 1.3 - 0.7j
        mean = math.sqrt(2) * np.array([alpha.real, alpha.imag])
        s = GaussianState(mean, 0.5 * np.eye(2))
        assert occupancy(s, 0) == pytest.approx(abs(alpha) ** 2, rel=1e-12)

    def test_reduce_errors(self):
        v = GaussianState.vacuum(2)
        with pytest.raises(ValueError):
            reduce(v, [])
        with pytest.raises(IndexError):
            reduce(v, [2])


class TestDynamics:
    def test_single_mode_drift_diffusion(self):
        dd = drift_diffusion(single_mode(omega=1.3, kappa=0.2))
        np.testing.assert_allclose(dd.A, [[-0.2, 1.3], [-1.3, -0.2]], atol=1e-14)
        np.testing.assert_allclose(dd.D, 0.2 * np.eye(2), atol=1e-14)

    def test_coherent_decay(self):
        kappa = 0.2
        dd = drift_diffusion(single_mode(omega=0.0, kappa=kappa))
        s0 = GaussianState(np.array([1.0, 0.0]), 0.5 * np.eye(2))
        t = np.array([0.5, 1.0, 2.0])
        out = evolve(s0, dd, t)
        for tk, sk in zip(t, out):
            assert sk.mean[0] == pytest.approx(math.exp(-kappa * tk), rel=1e-8)
            np.testing.assert_allclose(sk.cov, 0.5 * np.eye(2), atol=1e-10)

    def test_evolve_rejects_nonascending(self):
        dd = drift_diffusion(single_mode())
        with pytest.raises(ValueError):
            evolve(GaussianState.vacuum(1), dd, np.array([0.0, 1.0, 1.0]))

    def test_propagate_matches_evolve(self):
        p = ModelParams(delta=-2.0, g=0.5)
        p = ModelParams(delta=-2.0, g=1.5 * critical_coupling(p))
        dd = drift_diffusion(build_sr_hamiltonian(p))
        dt, n_steps = 0.1, 50
        times, means, covs = propagate_uniform(
            GaussianState.vacuum(3), dd, dt, n_steps
        )
        ref = evolve(GaussianState.vacuum(3), dd, times[1:])
        for k, sk in enumerate(ref, start=1):
            np.testing.assert_allclose(covs[k], sk.cov, atol=1e-9)

    def test_lyapunov_single_mode(self):
        # lossy empty cavity relaxes to vacuum
        dd = drift_diffusion(single_mode(omega=1.0, kappa=0.3))
        np.testing.assert_allclose(lyapunov_steady(dd), 0.5 * np.eye(2), atol=1e-12)

    def test_lyapunov_rejects_marginal(self):
        # the s sector is undamped: no unique steady covariance
        p = ModelParams(delta=-2.0, g=0.5)
        p = ModelParams(delta=-2.0, g=1.5 * critical_coupling(p))
        dd = drift_diffusion(build_collective_sr(p))
        with pytest.raises(MarginalStabilityError):
            lyapunov_steady(dd)

    def test_normal_phase_drift_not_amplifying(self):
        p = ModelParams(delta=-2.0, g=0.3)
        dd = drift_diffusion(build_normal_hamiltonian(p))
        assert np.max(np.linalg.eigvals(dd.A).real) <= 1e-10

    def test_drift_diffusion_validation(self):
        with pytest.raises(ValueError):
            DriftDiffusion(np.eye(2), -np.eye(2))
        with pytest.raises(ValueError):
            DriftDiffusion(np.eye(2), np.eye(3))


class TestModeTransform:
    def test_negativity_invariant_under_local_rotation(self):
        # rotate mode 2 only: phase-space rotation is orthogonal and local
        s = tmsv(0.6)
        th = 0.7
        n_before = log_negativity(s, ([0], [1]))
        rot = np.array([[math.cos(th), math.sin(th)], [-math.sin(th), math.cos(th)]])
        S = np.eye(4)
        S[2:, 2:] = rot
        cov = S @ s.cov @ S.T
        rotated = GaussianState(np.zeros(4), 0.5 * (cov + cov.T))
        assert log_negativity(rotated, ([0], [1])) == pytest.approx(
            n_before, rel=1e-12
        )

    def test_mode_transform_roundtrip(self):
        s = tmsv(0.4)
        O = np.array([[0.6, 0.8], [-0.8, 0.6]])
        back = mode_transform(mode_transform(s, O), O.T)
        np.testing.assert_allclose(back.cov, s.cov, atol=1e-12)

    def test_mode_transform_rejects_nonorthogonal(self):
        with pytest.raises(ValueError):
            mode_transform(GaussianState.vacuum(2), np.ones((2, 2)))
