import time

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qudit_ftqec.code_synthesis import (
    CodeSolveError,
    CodeWords,
    ErrorBasisCollapseError,
    build_error_basis,
    iter_partitions,
    kl_residual,
    solve_codewords,
    stabilizer_observable,
)
from qudit_ftqec.dephasing import KrausSet


def identity_kraus(d):
    return KrausSet(diagonals=np.ones((1, d), dtype=complex), t_snapshot=1.0)


def two_level_pair_embedded(gamma_t=0.5):
    """Two-level dephasing Kraus pair repeated diagonally on d=4."""
    e = np.exp(-gamma_t)
    a = np.sqrt((1 + e) / 2.0)
    b = np.sqrt((1 - e) / 2.0)
    diags = np.array([[a, a, a, a], [b, -b, b, -b]], dtype=complex)
    return KrausSet(diagonals=diags, t_snapshot=1.0)


def mesh_best_residual(kraus, n_errors, step):
    """Brute-force grid over both amplitude simplices, all partitions."""
    d = kraus.dim
    grid = np.arange(0.0, 1.0 + step / 2, step)
    best = np.inf
    for s0, s1 in iter_partitions(d):
        for p0_first in grid:
            p0 = np.array([p0_first, 1.0 - p0_first])
            for p1_first in grid:
                p1 = np.array([p1_first, 1.0 - p1_first])
                cw = CodeWords(
                    support0=s0, support1=s1,
                    amp0=np.sqrt(p0), amp1=np.sqrt(p1), kl_residual=0.0,
                )
                best = min(best, kl_residual(cw, kraus, n_errors))
    return best


def test_identity_channel_solves_trivially():
    cw = solve_codewords(identity_kraus(4), 1, 4)
    assert cw.kl_residual < 1e-12
    assert 0 in cw.support0
    assert set(cw.support0) | set(cw.support1) == {0, 1, 2, 3}


def test_embedded_two_level_pair_vs_mesh_oracle():
    kraus = two_level_pair_embedded()
    cw = solve_codewords(kraus, 2, 4)
    assert cw.kl_residual < 1e-10
    oracle = mesh_best_residual(kraus, 2, step=1e-3)
    assert cw.kl_residual <= oracle + 1e-9


def test_default_channel_vs_lp_oracle(system4):
    """Constrained-least-squares result against an L-inf LP on the same tensor."""
    from scipy.optimize import linprog

    kraus = system4.kraus
    cw = system4.codewords
    assert cw.kl_residual < 1e-8

    # LP: minimize t subject to |KL rows . p| <= t on the winning partition
    rows = []
    k = system4.n_errors
    diag = kraus.diagonals[:k]
    m = diag.conj()[:, None, :] * diag[None, :, :]
    for a in range(k):
        for b in range(a, k):
            rows.append(np.real(m[a, b]))
    rows = np.array(rows)
    d = kraus.dim
    signs = np.ones(d)
    signs[list(cw.support1)] = -1.0
    a_kl = rows * signs[None, :]
    n_rows = a_kl.shape[0]
    # variables: p (d) and t
    a_ub = np.vstack(
        [np.hstack([a_kl, -np.ones((n_rows, 1))]), np.hstack([-a_kl, -np.ones((n_rows, 1))])]
    )
    b_ub = np.zeros(2 * n_rows)
    a_eq = np.zeros((2, d + 1))
    a_eq[0, list(cw.support0)] = 1.0
    a_eq[1, list(cw.support1)] = 1.0
    b_eq = np.array([1.0, 1.0])
    bounds = [(0, None)] * d + [(0, None)]
    cost = np.zeros(d + 1)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds)
    assert res.success
    t_lp = res.x[-1]
    # feasibility agrees; the LP optimum cannot be beaten
    assert t_lp <= cw.kl_residual + 1e-12
    assert cw.kl_residual <= max(50.0 * t_lp, 1e-10)


def test_solver_never_beaten_by_coarse_mesh(system4):
    oracle = mesh_best_residual(system4.kraus, 2, step=1e-2)
    assert system4.codewords.kl_residual <= oracle + 1e-6


def test_solver_rejects_when_threshold_unreachable():
    kraus = two_level_pair_embedded()
    with pytest.raises(CodeSolveError) as err:
        solve_codewords(kraus, 2, 4, residual_threshold=1e-30)
    assert err.value.best_residual < 1e-10


def test_solver_determinism(system4):
    kraus = system4.kraus
    a = solve_codewords(kraus, 2, 4)
    b = solve_codewords(kraus, 2, 4)
    assert a.support0 == b.support0
    assert np.array_equal(a.amp0, b.amp0)
    assert np.array_equal(a.amp1, b.amp1)
    assert a.kl_residual == b.kl_residual


def test_partition_enumeration_count_and_runtime(cfg):
    assert sum(1 for _ in iter_partitions(12)) == 462
    from qudit_ftqec.protocol import build_system

    system12 = build_system(cfg, 12)
    t0 = time.time()
    solve_codewords(system12.kraus, 6, 12)
    assert time.time() - t0 < 10.0


def test_kl_residual_identity_zero():
    cw = solve_codewords(identity_kraus(4), 1, 4)
    assert kl_residual(cw, identity_kraus(4), 1) == 0.0


def test_kl_residual_symmetric_under_amp_swap(system4):
    cw = system4.codewords
    swapped = CodeWords(
        support0=cw.support0, support1=cw.support1,
        amp0=cw.amp1, amp1=cw.amp0, kl_residual=cw.kl_residual,
    )
    # Eq. 1a is symmetric under exchanging the two populations
    assert_allclose(
        kl_residual(swapped, system4.kraus, 2),
        kl_residual(cw, system4.kraus, 2),
        rtol=1e-10, atol=1e-15,
    )


def test_kl_residual_random_never_beats_solver(system4, rng):
    kraus = system4.kraus
    best = system4.codewords.kl_residual
    for _ in range(100):
        p0 = rng.dirichlet(np.ones(2))
        p1 = rng.dirichlet(np.ones(2))
        cw = CodeWords(
            support0=system4.codewords.support0,
            support1=system4.codewords.support1,
            amp0=np.sqrt(p0), amp1=np.sqrt(p1), kl_residual=0.0,
        )
        assert kl_residual(cw, kraus, 2) >= best - 1e-15


def test_kl_offdiagonal_condition_exact(system4):
    """Eq. 1b holds identically: disjoint supports and diagonal operators."""
    cw = system4.codewords
    kraus = system4.kraus
    w0 = cw.vector(0, 4)
    w1 = cw.vector(1, 4)
    for a in range(2):
        for b in range(2):
            prod = kraus.diagonals[a].conj() * kraus.diagonals[b]
            assert abs(np.vdot(w0, prod * w1)) < 1e-15


def test_error_basis_identity_channel_equals_codewords():
    kraus = identity_kraus(4)
    cw = solve_codewords(kraus, 1, 4)
    basis = build_error_basis(cw, kraus, 1)
    assert_allclose(basis.word(0, 0), cw.vector(0, 4), atol=1e-14)
    assert_allclose(basis.word(1, 0), cw.vector(1, 4), atol=1e-14)


def test_error_basis_collapse_on_dependent_errors():
    diag = np.ones((2, 4), dtype=complex)
    diag[1] *= 0.5  # E_1 proportional to E_0
    kraus = KrausSet.__new__(KrausSet)
    object.__setattr__(kraus, "diagonals", diag)
    object.__setattr__(kraus, "t_snapshot", 1.0)
    cw = CodeWords(
        support0=(0, 1), support1=(2, 3),
        amp0=np.sqrt([0.5, 0.5]),
        amp1=np.sqrt([0.5, 0.5]), kl_residual=0.0,
    )
    with pytest.raises(ErrorBasisCollapseError):
        build_error_basis(cw, kraus, 2)


def test_error_basis_orthonormal(system4):
    vectors = system4.error_basis.vectors
    gram = vectors.conj().T @ vectors
    assert np.abs(gram - np.eye(4)).max() < 1e-10


def test_stabilizer_projector_cases(system4):
    basis = system4.error_basis
    # K=1 sub-basis: projector onto the code block
    from qudit_ftqec.code_synthesis import ErrorBasis

    sub = ErrorBasis(
        vectors=np.column_stack([basis.word(0, 0), basis.word(1, 0)]), n_errors=1
    )
    s1 = stabilizer_observable(sub, [1.0])
    assert_allclose(s1 @ s1, s1, atol=1e-12)
    s = stabilizer_observable(basis, [0.0, 1.0])
    span = basis.vectors @ basis.vectors.conj().T
    assert_allclose(s @ s @ span, s @ span, atol=1e-12)


def test_stabilizer_rejects_duplicate_eigenvalues(system4):
    with pytest.raises(ValueError, match="distinct"):
        stabilizer_observable(system4.error_basis, [1.0, 1.0])


def test_stabilizer_born_rule(system4):
    """Measuring the stabilizer on the error word |0,1> gives its syndrome."""
    basis = system4.error_basis
    lambdas = [0.0, 1.0]
    s = stabilizer_observable(basis, lambdas)
    state = basis.word(0, 1)
    # Born rule, computed numerically from the eigenprojectors of S
    evals, evecs = np.linalg.eigh(s)
    prob_lambda1 = 0.0
    for val, vec in zip(evals, evecs.T):
        if abs(val - 1.0) < 1e-9:
            prob_lambda1 += abs(np.vdot(vec, state)) ** 2
    assert_allclose(prob_lambda1, 1.0, atol=1e-10)


def test_codewords_serialization_roundtrip(system4):
    cw = system4.codewords
    again = CodeWords.from_dict(cw.to_dict())
    assert again.support0 == cw.support0
    assert_allclose(again.amp0, cw.amp0)
    from qudit_ftqec.code_synthesis import ErrorBasis

    basis2 = ErrorBasis.from_dict(system4.error_basis.to_dict())
    assert_allclose(basis2.vectors, system4.error_basis.vectors)
