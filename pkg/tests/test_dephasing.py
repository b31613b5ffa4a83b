import numpy as np
import pytest
from numpy.testing import assert_allclose

from qudit_ftqec.dephasing import (
    DephasingSpec,
    RateMatrix,
    apply_dephasing,
    calibrate_to_t2,
    compute_rates,
    decoherence_matrix,
    kraus_decompose,
)


def random_valid_rates(rng, d, n_modes=None):
    """Rates from random bath embeddings: gamma_ij = (x_i-x_j)^T C (x_i-x_j).

    Such matrices are conditionally negative definite, so exp(-gamma t) is
    positive semidefinite for every t — the class of physical pure-dephasing
    generators.
    """
    n_modes = n_modes or rng.integers(1, 5)
    x = rng.normal(size=(d, n_modes))
    a = rng.normal(size=(n_modes, n_modes))
    c = a @ a.T
    diffs = x[:, None, :] - x[None, :, :]
    gamma = np.einsum("ijk,kl,ijl->ij", diffs, c, diffs)
    gamma = 0.5 * (gamma + gamma.T)
    np.fill_diagonal(gamma, 0.0)
    return RateMatrix(gamma=np.clip(gamma, 0.0, None))


def test_rates_zero_diagonal_and_single_site_closed_form():
    z = np.array([[-0.5], [0.5]])
    c = 3.7
    spec = DephasingSpec(c_matrix=np.array([[c]]), t2_ref=1.0)
    rates = compute_rates(z, spec)
    assert rates.gamma[0, 0] == 0.0 and rates.gamma[1, 1] == 0.0
    # gamma_01 = c [1/4 + 1/4 - 2 (-1/4)] = c
    assert_allclose(rates.gamma[0, 1], c, rtol=1e-12)


def test_rates_match_double_loop_oracle(system4, rng):
    """Vectorized rates against a literal four-index reimplementation."""
    z = system4.z
    n = z.shape[1]
    diag = rng.uniform(0.5, 2.0, n)
    spec = DephasingSpec(c_matrix=np.diag(diag), t2_ref=1.0)
    rates = compute_rates(z, spec)
    entries = [(0, 1), (0, 3), (1, 2), (2, 3), (1, 3)]
    for i, j in entries:
        expected = 0.0
        for k in range(n):
            for kp in range(n):
                c = diag[k] if k == kp else 0.0
                expected += c * (
                    z[i, k] * z[i, kp] + z[j, k] * z[j, kp] - 2.0 * z[i, k] * z[j, kp]
                )
        assert_allclose(rates.gamma[i, j], expected, rtol=1e-10, atol=1e-12)


def test_rates_reject_unphysical_c(system4):
    c = np.array([[1.0, 2.0], [2.0, 1.0]])  # eigenvalue -1: not PSD
    z = np.array([[0.5, -0.5], [-0.5, 0.5]])
    with pytest.raises(ValueError, match="not positive semidefinite"):
        compute_rates(z, DephasingSpec(c_matrix=c, t2_ref=1.0))


def test_apply_dephasing_identities():
    gamma = RateMatrix(gamma=np.array([[0.0, 2.0], [2.0, 0.0]]))
    rho_plus = 0.5 * np.ones((2, 2), dtype=complex)
    assert_allclose(apply_dephasing(rho_plus, gamma, 0.0), rho_plus)
    mixed = 0.5 * np.eye(2, dtype=complex)
    assert_allclose(apply_dephasing(mixed, gamma, 17.0), mixed)
    # |+><+| at t = T2: off-diagonal e^{-1}/2
    t2 = 0.5
    out = apply_dephasing(rho_plus, gamma, t2)
    assert_allclose(out[0, 1], 0.5 * np.exp(-1.0))
    assert_allclose(np.trace(out), 1.0)


def test_apply_dephasing_rejects_negative_time():
    gamma = RateMatrix(gamma=np.zeros((2, 2)))
    with pytest.raises(ValueError):
        apply_dephasing(np.eye(2) / 2, gamma, -1.0)


def test_kraus_identity_channel():
    rates = RateMatrix(gamma=np.zeros((3, 3)))
    kraus = kraus_decompose(rates, 1.0)
    assert kraus.n_ops == 1
    assert_allclose(kraus.ops[0], np.eye(3), atol=1e-12)


def test_kraus_two_level_closed_form():
    gamma_val = 0.8
    t = 0.9
    rates = RateMatrix(gamma=np.array([[0.0, gamma_val], [gamma_val, 0.0]]))
    kraus = kraus_decompose(rates, t)
    e = np.exp(-gamma_val * t)
    # analytic two-level dephasing channel
    e0_expected = np.sqrt((1.0 + e) / 2.0) * np.eye(2)
    e1_expected = np.sqrt((1.0 - e) / 2.0) * np.diag([1.0, -1.0])
    assert_allclose(kraus.ops[0], e0_expected, atol=1e-12)
    assert_allclose(kraus.ops[1], e1_expected, atol=1e-12)


def test_kraus_default_hierarchy(system4):
    """Two leading error operators, the rest at least an order of magnitude down."""
    norms = system4.kraus.norms
    assert norms[2] <= 0.1 * norms[1]
    assert np.all(np.diff(norms) <= 1e-12)  # non-increasing
    k = system4.n_errors
    assert norms[k] / norms[k - 1] < 1.0


def test_kraus_rejects_bad_inputs():
    rates = RateMatrix(gamma=np.zeros((2, 2)))
    with pytest.raises(ValueError):
        kraus_decompose(rates, 0.0)


def test_calibration_idempotent_and_linear(cfg):
    spec = calibrate_to_t2(cfg.dephasing)
    again = calibrate_to_t2(spec)
    assert_allclose(again.c_matrix, spec.c_matrix, rtol=1e-12)
    doubled = calibrate_to_t2(
        DephasingSpec(c_matrix=spec.c_matrix, t2_ref=2.0 * spec.t2_ref)
    )
    assert_allclose(doubled.c_matrix, 0.5 * spec.c_matrix, rtol=1e-12)


def test_calibration_reference_decay():
    t2 = 10e-6
    spec = calibrate_to_t2(DephasingSpec(c_matrix=np.array([[123.0]]), t2_ref=t2))
    z = np.array([[-0.5], [0.5]])
    rates = compute_rates(z, spec)
    rho = 0.5 * np.ones((2, 2), dtype=complex)
    for t in (1e-6, 5e-6, 20e-6):
        out = apply_dephasing(rho, rates, t)
        assert_allclose(out[0, 1], 0.5 * np.exp(-t / t2), rtol=1e-12)


def test_calibration_rejects_silent_bath():
    with pytest.raises(ValueError, match="no dephasing"):
        calibrate_to_t2(DephasingSpec(c_matrix=np.zeros((2, 2)), t2_ref=1.0))


def test_channel_equivalence_random(rng):
    """Kraus application equals the closed-form channel, 100 random trials."""
    for _ in range(100):
        d = int(rng.integers(2, 13))
        rates = random_valid_rates(rng, d)
        t = float(rng.uniform(0.1, 2.0))
        lam = decoherence_matrix(rates, t)
        assert np.linalg.eigvalsh(lam).min() > -1e-10
        kraus = kraus_decompose(rates, t)
        completeness = sum(op.conj().T @ op for op in kraus.ops)
        assert np.abs(completeness - np.eye(d)).max() < 1e-10
        psi = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi /= np.linalg.norm(psi)
        rho = np.outer(psi, psi.conj())
        assert np.abs(kraus.apply(rho) - apply_dephasing(rho, rates, t)).max() < 1e-10
