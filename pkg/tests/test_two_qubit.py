import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import expm

from qudit_ftqec.dephasing import RateMatrix
from qudit_ftqec.lindblad import DensityMatrix, EvolutionSegment, evolve_segment
from qudit_ftqec.two_qubit import (
    TWO_QUBIT_CARDINALS,
    UnreachablePhaseError,
    build_architecture,
    conditional_shift_operator,
    cphase_schedule,
    evolve_factor,
    run_two_qubit_cycle,
    solve_semiresonant_drive,
    _evolve_conditional_gate,
    _unit_rates,
)

LAM = 2.0 * np.pi * 0.05e9
NOISELESS = float("inf")


@pytest.fixture(scope="module")
def arch4(cfg):
    return build_architecture(cfg, 4, LAM, np.pi)


@pytest.fixture(scope="module")
def arch_base(cfg):
    return build_architecture(cfg, 2, LAM, np.pi)


def test_drive_solution_closes_both_loops(arch4):
    drv = arch4.drive
    omega1 = np.sqrt(drv.rabi**2 + drv.delta**2)
    omega2 = np.sqrt(drv.rabi**2 + (drv.delta - LAM) ** 2)
    assert_allclose(omega1 * drv.duration, 2.0 * np.pi, rtol=1e-9)
    assert_allclose(omega2 * drv.duration, 2.0 * np.pi * drv.m2, rtol=1e-9)
    # conditional-phase comb (wrapped distance to the target phase)
    phase = -LAM * drv.duration / 2.0 + np.pi * (1 - drv.m2)
    wrapped = np.mod(phase - np.pi, 2.0 * np.pi)
    assert min(wrapped, 2.0 * np.pi - wrapped) < 1e-6
    # resolvability: conditional shift exceeds ten drive linewidths
    assert LAM * drv.duration / (2.0 * np.pi) >= 10.0


def test_unreachable_phase_raises():
    with pytest.raises(UnreachablePhaseError):
        solve_semiresonant_drive(lam=LAM, rabi_max=1.0, phi=np.pi)  # rabi cap tiny


def test_conditional_shift_projector_algebra(arch4):
    shift = conditional_shift_operator(arch4)
    basis = arch4.system.error_basis
    w00 = arch4.system.logical_state(1.0, 0.0)
    sw_exc = basis.word(1, 0)
    # <0_L 0_L| block: no shift
    vec00 = np.kron(np.kron(w00, sw_exc), w00)
    assert abs(np.vdot(vec00, shift @ vec00)) < 1e-12
    # |1_L 1_L| block with excited switch: shift is exactly lam
    w1 = arch4.system.logical_state(0.0, 1.0)
    vec11 = np.kron(np.kron(w1, sw_exc), w1)
    assert_allclose(np.vdot(vec11, shift @ vec11).real, LAM, rtol=1e-12)
    # the shift is exactly lam * N1 (x) P_exc (x) N2: linear in lam, so the
    # lam -> 0 limit leaves switch transitions state-independent
    expected = arch4.lam * np.kron(
        np.kron(arch4.support1_projector, arch4.support1_projector),
        arch4.support1_projector,
    )
    assert np.abs(shift - expected).max() < 1e-12


def test_cphase_ideal_unitary_vs_dense_oracle(cfg, arch4):
    """gamma = 0 joint evolution against a direct matrix exponential."""
    d = arch4.unit_d
    drv = arch4.drive
    p1 = arch4.support1_projector
    eye = np.eye(d, dtype=complex)
    # full conditional Hamiltonian: drive + (delta - lam) P_e + lam N1 P_e N2
    h_det = drv.rabi * arch4.drive_axis + (drv.delta - arch4.lam) * p1
    h_joint = np.kron(np.kron(eye, h_det), eye) + arch4.lam * np.kron(np.kron(p1, p1), p1)
    u = expm(-1j * h_joint * drv.duration)

    def unit(a, b):
        return arch4.system.logical_state(a, b)

    words = (unit(1.0, 0.0), unit(0.0, 1.0))
    sw0 = words[0]
    cphase = np.diag([1.0, 1.0, 1.0, np.exp(1j * arch4.phi)])
    worst = 1.0
    for a1, b1 in TWO_QUBIT_CARDINALS:
        for a2, b2 in TWO_QUBIT_CARDINALS:
            psi = np.kron(np.kron(unit(a1, b1), sw0), unit(a2, b2))
            out = u @ psi
            ideal_l = cphase @ np.kron([a1, b1], [a2, b2])
            ideal = sum(
                ideal_l[2 * x + y] * np.kron(np.kron(words[x], sw0), words[y])
                for x in (0, 1)
                for y in (0, 1)
            )
            fid = abs(np.vdot(ideal, out)) ** 2
            worst = min(worst, fid)
    assert worst > 1.0 - 1e-4


def test_gate_propagator_matches_dense_oracle(arch4):
    """Sector-factorized propagator vs direct superoperator on the full space."""
    d = arch4.unit_d
    rng = np.random.default_rng(7)
    dim = d**3
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = m @ m.conj().T
    rho = m / np.trace(m)
    gamma_u = _unit_rates(arch4, 5e-6)
    out = _evolve_conditional_gate(rho, arch4, gamma_u)

    # oracle: RK4 on the full joint space with the full kron-sum rates
    p1 = arch4.support1_projector
    eye = np.eye(d, dtype=complex)
    drv = arch4.drive
    h_det = drv.rabi * arch4.drive_axis + (drv.delta - arch4.lam) * p1
    h_joint = np.kron(np.kron(eye, h_det), eye) + arch4.lam * np.kron(np.kron(p1, p1), p1)
    ones = np.ones((d, d))
    gamma_joint = (
        np.kron(np.kron(gamma_u, ones), ones)
        + np.kron(np.kron(ones, gamma_u), ones)
        + np.kron(np.kron(ones, ones), gamma_u)
    )
    seg = EvolutionSegment(
        h_eff=h_joint, duration=drv.duration, gamma=RateMatrix(gamma=gamma_joint)
    )
    oracle = evolve_segment(DensityMatrix(matrix=rho), seg)
    assert np.abs(out - oracle.matrix).max() < 1e-7


def test_evolve_factor_matches_rk4(rng):
    """Generic factor propagator against the RK4 engine on a product space."""
    da, db = 3, 4
    h_a = rng.normal(size=(da, da)) + 1j * rng.normal(size=(da, da))
    h_a = 0.5 * (h_a + h_a.conj().T)
    ga = np.abs(rng.normal(size=(da, da)))
    ga = 0.5 * (ga + ga.T)
    np.fill_diagonal(ga, 0.0)
    gb = np.abs(rng.normal(size=(db, db)))
    gb = 0.5 * (gb + gb.T)
    np.fill_diagonal(gb, 0.0)
    m = rng.normal(size=(da * db, da * db)) + 1j * rng.normal(size=(da * db, da * db))
    m = m @ m.conj().T
    rho = m / np.trace(m)
    t = 0.8
    out = evolve_factor(rho, (da, db), (0,), h_a, ga, [gb], t)
    h_full = np.kron(h_a, np.eye(db))
    gamma_full = np.kron(ga, np.ones((db, db))) + np.kron(np.ones((da, da)), gb)
    seg = EvolutionSegment(h_eff=h_full, duration=t, gamma=RateMatrix(gamma=gamma_full))
    oracle = evolve_segment(DensityMatrix(matrix=rho), seg)
    assert np.abs(out - oracle.matrix).max() < 1e-7


def test_cphase_conditional_phases(arch4):
    """Relative phases: 00/01/10 agree, 11 differs by phi."""
    d = arch4.unit_d

    def unit(a, b):
        return arch4.system.logical_state(a, b)

    sw0 = unit(1.0, 0.0)
    states = {}
    plus = 1.0 / np.sqrt(2)
    psi = np.kron(np.kron(plus * (unit(1, 0) + unit(0, 1)), sw0), plus * (unit(1, 0) + unit(0, 1)))
    rho = np.outer(psi, psi.conj())
    out = _evolve_conditional_gate(rho, arch4, _unit_rates(arch4, NOISELESS) * 0.0)
    # logical 2-qubit matrix
    from qudit_ftqec.two_qubit import _decode_two_qubit

    rho_l = _decode_two_qubit(arch4, out)
    # phases relative to the 00 component
    ref = rho_l[0, 0]
    phases = np.angle(rho_l[0, :] / rho_l[0, 0])
    assert abs(phases[1]) < 1e-3
    assert abs(phases[2]) < 1e-3
    assert abs(abs(phases[3]) - arch4.phi) < 1e-2


def test_switch_returns_to_ground(arch4):
    def unit(a, b):
        return arch4.system.logical_state(a, b)

    sw0 = unit(1.0, 0.0)
    psi = np.kron(np.kron(unit(0, 1), sw0), unit(0, 1))  # |1_L 1_L>: resonant sector
    rho = np.outer(psi, psi.conj())
    out = _evolve_conditional_gate(rho, arch4, _unit_rates(arch4, NOISELESS) * 0.0)
    d = arch4.unit_d
    sup1 = list(arch4.system.codewords.support1)
    r6 = out.reshape(d, d, d, d, d, d)
    switch_pops = np.real(np.einsum("asbasb->s", r6))
    assert switch_pops[sup1].sum() < 1e-4


def test_far_detuned_identity(cfg):
    arch0 = build_architecture(cfg, 4, LAM, 0.0)
    res = run_two_qubit_cycle(arch0, NOISELESS)
    assert res["e_e"] < 1e-6


def test_noiseless_cycle_with_ec(arch4):
    res = run_two_qubit_cycle(arch4, NOISELESS)
    assert res["e_e"] < 1e-4
    for f in res["fidelities"]:
        assert f > 1.0 - 1e-4


def test_noiseless_baseline(arch_base):
    res = run_two_qubit_cycle(arch_base, NOISELESS)
    assert res["e_e"] < 1e-6


def test_cphase_schedule_is_et(arch4):
    sched = cphase_schedule(arch4)
    assert sched.n_pulses == 4  # every ell=0 level to every ell=1 level
    assert sched.duration > 0


def test_static_joint_hamiltonian(arch4):
    from qudit_ftqec.two_qubit import static_joint_hamiltonian

    h = static_joint_hamiltonian(arch4)
    # diagonal (Ising-like conditional shift) and Hermitian
    assert np.abs(h - np.diag(np.diag(h))).max() < 1e-12
    # the |1_L 1_L| sector with the switch excited carries exactly +lam
    basis = arch4.system.error_basis
    w1 = arch4.system.logical_state(0.0, 1.0)
    sw_exc = basis.word(1, 0)
    vec = np.kron(np.kron(w1, sw_exc), w1)
    bare = static_joint_hamiltonian(
        build_architecture(arch4.system.cfg, 4, arch4.lam, arch4.phi)
    ) - conditional_shift_operator(arch4)
    shift = np.vdot(vec, (h - bare) @ vec).real
    assert abs(shift - arch4.lam) < 1e-6 * arch4.lam
