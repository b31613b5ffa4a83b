import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import expm

from qudit_ftqec.dephasing import RateMatrix, apply_dephasing
from qudit_ftqec.lindblad import (
    DensityMatrix,
    EvolutionSegment,
    IntegrationError,
    IntegratorConfig,
    evolve_segment,
    free_decay,
    lindblad_superoperator,
)


def superop_oracle(rho, h, gamma, t):
    """Dense superoperator exponential, independent of the RK4 path."""
    sup = lindblad_superoperator(h, gamma)
    out = expm(sup * t) @ rho.reshape(-1)
    return out.reshape(rho.shape)


def random_state(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = m @ m.conj().T
    return m / np.trace(m)


def test_idle_segment_is_identity():
    rho = DensityMatrix.pure(np.array([1.0, 1.0]) / np.sqrt(2))
    seg = EvolutionSegment(h_eff=np.zeros((2, 2)), duration=1.0)
    out = evolve_segment(rho, seg)
    assert_allclose(out.matrix, rho.matrix, atol=1e-14)


def test_pure_dephasing_matches_closed_form(rng):
    d = 4
    gamma = np.abs(rng.normal(size=(d, d)))
    gamma = 0.5 * (gamma + gamma.T)
    np.fill_diagonal(gamma, 0.0)
    rates = RateMatrix(gamma=gamma)
    rho = DensityMatrix(matrix=random_state(rng, d))
    seg = EvolutionSegment(h_eff=np.zeros((d, d)), duration=0.8, gamma=rates)
    out = evolve_segment(rho, seg)
    expected = apply_dephasing(rho.matrix, rates, 0.8)
    assert np.abs(out.matrix - expected).max() < 1e-8


def test_pi_pulse_population_swap():
    h = (np.pi / 2) * np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    rho = DensityMatrix.pure(np.array([1.0, 0.0]))
    seg = EvolutionSegment(h_eff=h, duration=1.0)
    out = evolve_segment(rho, seg)
    u = expm(-1j * h)
    expected = u @ rho.matrix @ u.conj().T
    # swap fidelity against the dense exponential oracle
    assert out.matrix[1, 1].real > expected[1, 1].real - 1e-8
    assert np.abs(out.matrix - expected).max() < 1e-7


def test_drive_plus_dephasing_vs_superoperator_oracle(rng):
    d = 8
    h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = 0.5 * (h + h.conj().T)
    gamma = np.abs(rng.normal(size=(d, d)))
    gamma = 0.5 * (gamma + gamma.T)
    np.fill_diagonal(gamma, 0.0)
    rho = random_state(rng, d)
    t = 0.7
    seg = EvolutionSegment(h_eff=h, duration=t, gamma=RateMatrix(gamma=gamma))
    out = evolve_segment(DensityMatrix(matrix=rho), seg)
    expected = superop_oracle(rho, h, gamma, t)
    assert np.abs(out.matrix - expected).max() < 1e-8


def test_rk4_convergence_order(rng):
    """Halving dt shrinks the error by roughly 2^4."""
    d = 8
    h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = 0.5 * (h + h.conj().T)
    gamma = np.abs(rng.normal(size=(d, d)))
    gamma = 0.5 * (gamma + gamma.T)
    np.fill_diagonal(gamma, 0.0)
    rho = random_state(rng, d)
    t = 0.5
    seg = EvolutionSegment(h_eff=h, duration=t, gamma=RateMatrix(gamma=gamma))
    exact = superop_oracle(rho, h, gamma, t)
    cfg = IntegratorConfig(trace_tol=1e-6)
    err = {}
    for n in (8, 16):
        out = evolve_segment(DensityMatrix(matrix=rho), seg, cfg, n_steps=n)
        err[n] = np.abs(out.matrix - exact).max()
    ratio = err[8] / err[16]
    assert 10.0 < ratio < 22.0


def test_commuting_drive_equals_free_decay(rng):
    """Diagonal drive commuting with the state: pure decay."""
    d = 4
    h = np.diag(rng.normal(size=d)).astype(complex)
    gamma = np.abs(rng.normal(size=(d, d)))
    gamma = 0.5 * (gamma + gamma.T)
    np.fill_diagonal(gamma, 0.0)
    rates = RateMatrix(gamma=gamma)
    rho = DensityMatrix(matrix=np.diag(rng.dirichlet(np.ones(d))).astype(complex))
    seg = EvolutionSegment(h_eff=h, duration=1.3, gamma=rates)
    out = evolve_segment(rho, seg)
    expected = free_decay(rho, rates, 1.3)
    assert np.abs(out.matrix - expected.matrix).max() < 1e-9


def test_commuting_transverse_case():
    """[H, rho0] = 0 with H = X and rho in the X eigenbasis stays decay-only."""
    h = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    rho0 = 0.5 * np.array([[1.0, 0.6], [0.6, 1.0]], dtype=complex)
    gamma = RateMatrix(gamma=np.array([[0.0, 2.0], [2.0, 0.0]]))
    seg = EvolutionSegment(h_eff=h, duration=0.9, gamma=gamma)
    out = evolve_segment(DensityMatrix(matrix=rho0), seg)
    expected = free_decay(DensityMatrix(matrix=rho0), gamma, 0.9)
    assert np.abs(out.matrix - expected.matrix).max() < 1e-8


def test_trace_and_hermiticity_preserved(rng):
    d = 6
    h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = 0.5 * (h + h.conj().T)
    gamma = np.abs(rng.normal(size=(d, d)))
    gamma = 0.5 * (gamma + gamma.T)
    np.fill_diagonal(gamma, 0.0)
    seg = EvolutionSegment(h_eff=h, duration=2.0, gamma=RateMatrix(gamma=gamma))
    out = evolve_segment(DensityMatrix(matrix=random_state(rng, d)), seg)
    assert abs(np.trace(out.matrix).real - 1.0) < 1e-9
    assert np.abs(out.matrix - out.matrix.conj().T).max() < 1e-12


def test_free_decay_delegates():
    rates = RateMatrix(gamma=np.array([[0.0, 1.0], [1.0, 0.0]]))
    rho = DensityMatrix.pure(np.array([1.0, 1.0]) / np.sqrt(2))
    out = free_decay(rho, rates, 0.5)
    assert_allclose(out.matrix, apply_dephasing(rho.matrix, rates, 0.5))
    with pytest.raises(ValueError):
        free_decay(rho, rates, -0.1)


def test_step_cap_enforced():
    h = 1e6 * np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    seg = EvolutionSegment(h_eff=h, duration=1.0)
    with pytest.raises(IntegrationError, match="cap"):
        evolve_segment(
            DensityMatrix.pure(np.array([1.0, 0.0])), seg, IntegratorConfig(n_max=10)
        )


def test_density_matrix_validation():
    bad_trace = DensityMatrix(matrix=np.eye(2, dtype=complex))
    with pytest.raises(IntegrationError, match="trace"):
        bad_trace.validate()
    non_herm = DensityMatrix(matrix=np.array([[0.5, 0.5], [0.0, 0.5]], dtype=complex))
    with pytest.raises(IntegrationError, match="Hermiticity"):
        non_herm.validate()
    negative = DensityMatrix(matrix=np.diag([1.5, -0.5]).astype(complex))
    with pytest.raises(IntegrationError, match="positivity"):
        negative.validate()
