"""Encode - gate - stabilize - measure - recover - decode cycles.

The cycle is simulated branch-exactly: density matrices evolve under the
Lindblad engine, probability branches only at measurements, and branch
weights are propagated exactly (no Monte Carlo).  Measurement errors are
classical label noise: each of n_rep conditionally independent reads reports
the true syndrome with probability 1 - p_m, a uniformly random wrong label
otherwise, and the majority vote picks the recovery.

Two logical-error metrics are reported per cycle:

* ``e_e`` (entanglement error, the figure-of-merit of the threshold plots):
  fidelity of the syndrome-traced logical state, i.e. the logical content
  summed over error sectors.  Residual weight parked in a wrong sector with
  intact logical coherences is *not* a logical failure; it is corrected by
  the next cycle.
* ``block_e_e`` (protocol-failure metric): fidelity of the (ell,0) code-block
  alone.  Any weight left outside the code block, e.g. after a misassigned
  recovery, counts as failure.  Measurement-repetition behaviour is resolved
  on this metric.
"""

import hashlib
import json
from dataclasses import dataclass, field, replace
from itertools import combinations_with_replacement
from math import factorial

import numpy as np

from .code_synthesis import (
    CodeWords,
    ErrorBasis,
    build_error_basis,
    solve_codewords,
)
from .config import RunConfig
from .dephasing import (
    KrausSet,
    RateMatrix,
    calibrate_to_t2,
    compute_rates,
    kraus_decompose,
)
from .et_compiler import (
    GeneratorMatrix,
    LogicalGateSpec,
    cu_unitary,
    gate_duration,
    generator_of,
    planar_generator,
    planar_rotation,
    preparation_unitary,
    recovery_unitary,
)
from .lindblad import (
    DensityMatrix,
    EvolutionSegment,
    IntegratorConfig,
    evolve_segment,
)
from .spin_model import (
    build_hamiltonian,
    diagonalize,
    select_qudit_basis,
    sz_diagonal_elements,
)

# Planar-rotation set averaged in the threshold figures.
PAPER_GATE_SET = (
    (np.pi / 4, np.pi),
    (np.pi / 2, np.pi),
    (np.pi / 2, -np.pi / 2),
    (np.pi / 2, -np.pi / 4),
    (np.pi / 2, -np.pi / 8),
)

# Logical Bloch states used for the entanglement-fidelity average.
CARDINAL_STATES = (
    (1.0, 0.0),
    (0.0, 1.0),
    (1.0 / np.sqrt(2), 1.0 / np.sqrt(2)),
    (1.0 / np.sqrt(2), -1.0 / np.sqrt(2)),
    (1.0 / np.sqrt(2), 1j / np.sqrt(2)),
    (1.0 / np.sqrt(2), -1j / np.sqrt(2)),
)

BRANCH_PRUNE = 1e-12


@dataclass(frozen=True)
class MeasurementModel:
    """Per-read misassignment probability and odd majority-vote repetitions."""

    p_m: float = 0.0
    n_rep: int = 1

    def __post_init__(self):
        if not 0.0 <= self.p_m < 1.0:
            raise ValueError("p_m must be in [0, 1)")
        if self.n_rep < 1 or self.n_rep % 2 == 0:
            raise ValueError("n_rep must be odd and >= 1")


def majority_vote_matrix(n_outcomes: int, model: MeasurementModel) -> np.ndarray:
    """q[true, voted]: exact distribution of the majority label.

    Reads are iid given the true syndrome: correct with 1 - p_m, otherwise
    uniform over the wrong labels.  Vote ties break to the smallest label.
    """
    k, n = n_outcomes, model.n_rep
    if k == 1:
        return np.ones((1, 1))
    q = np.zeros((k, k))
    for true in range(k):
        probs = np.full(k, model.p_m / (k - 1))
        probs[true] = 1.0 - model.p_m
        for counts in _count_vectors(n, k):
            p = _multinomial(n, counts) * np.prod(probs ** np.asarray(counts))
            if p == 0.0:
                continue
            voted = int(np.argmax(counts))  # argmax takes the smallest on ties
            q[true, voted] += p
    return q


def _count_vectors(n: int, k: int):
    for combo in combinations_with_replacement(range(k), n):
        counts = [0] * k
        for c in combo:
            counts[c] += 1
        yield counts


def _multinomial(n: int, counts) -> float:
    out = factorial(n)
    for c in counts:
        out //= factorial(c)
    return float(out)


@dataclass(frozen=True)
class DecodedState:
    """Logical content of a qudit state in the error-word basis."""

    block: np.ndarray            # <ell,0| rho |ell',0>
    traced: np.ndarray           # sum_k <ell,k| rho |ell',k>
    block_leakage: float         # 1 - tr(block)
    span_leakage: float          # population outside the error-word span
    support_populations: tuple[float, float]  # ell readout by support sums


@dataclass(frozen=True)
class CycleReport:
    """Per-cycle metrics, averaged over the cardinal logical states."""

    d: int
    t2: float
    theta: float
    phi: float
    syndrome_distribution: np.ndarray
    fidelity_per_state: tuple[float, ...]
    f_e: float
    e_e: float
    block_f_e: float
    block_e_e: float
    acceptance_probability: float
    leakage: float

    def as_row(self, circuit: str, extra: dict | None = None) -> dict:
        row = {
            "d": self.d,
            "t2_us": self.t2 * 1e6,
            "theta": self.theta,
            "phi": self.phi,
            "circuit": circuit,
            "E_e": self.e_e,
            "F_e": self.f_e,
            "leakage": self.leakage,
            "acceptance": self.acceptance_probability,
        }
        for k, p in enumerate(self.syndrome_distribution):
            row[f"syndrome_{k}"] = float(p)
        if extra:
            row.update(extra)
        return row


class LogicalQubitSystem:
    """Bundled eigenstructure, channel, code and compiled ET operations.

    Everything is derived from a :class:`RunConfig` and the qudit dimension.
    The dephasing rates are calibrated at ``t2_ref``; running at another T2
    rescales them linearly (the code and the compiled pulses stay fixed, as
    they would in hardware).
    """

    def __init__(self, cfg: RunConfig, d: int, rabi_max: float | None = None):
        self.cfg = cfg
        self.d = d
        self.n_errors = d // 2

        h = build_hamiltonian(cfg.topology)
        self.eig = diagonalize(h)
        self.basis = select_qudit_basis(self.eig, d, topology=cfg.topology)
        self.energies = self.eig.energies[: d]
        self.z = sz_diagonal_elements(self.eig, self.basis, cfg.topology)

        self.spec = calibrate_to_t2(cfg.dephasing)
        self.t2_ref = self.spec.t2_ref
        self.rates_ref = compute_rates(self.z, self.spec)
        self.kraus: KrausSet = kraus_decompose(self.rates_ref, cfg.drive.gate_time)
        self.codewords: CodeWords = solve_codewords(self.kraus, self.n_errors, d)
        self.error_basis: ErrorBasis = build_error_basis(
            self.codewords, self.kraus, self.n_errors
        )

        if rabi_max is None:
            rabi_max = calibrated_rabi_max(cfg)
        self.rabi_max = rabi_max

        self.cu_gen: GeneratorMatrix = generator_of(
            cu_unitary(self.error_basis, self.n_errors)
        )
        self.tau_cu = gate_duration(self.cu_gen, rabi_max)
        self.recovery_gens: list[GeneratorMatrix | None] = [None]
        self.recovery_taus = [0.0]
        for k in range(1, self.n_errors):
            gen = generator_of(recovery_unitary(self.error_basis, k))
            self.recovery_gens.append(gen)
            self.recovery_taus.append(gate_duration(gen, rabi_max))
        self.prep_gen = generator_of(preparation_unitary(self.error_basis))
        self.tau_prep = gate_duration(self.prep_gen, rabi_max)

        self.integrator = cfg.integrator

    # -- channel helpers ----------------------------------------------------

    def rates_at(self, t2: float) -> RateMatrix:
        if t2 <= 0:
            raise ValueError("T2 must be positive")
        return self.rates_ref.scaled(self.t2_ref / t2)

    def ancilla_rates_at(self, t2: float) -> RateMatrix:
        k = self.n_errors
        t2_anc = t2 * self.cfg.ancilla_t2_factor
        gamma = np.full((k, k), 1.0 / t2_anc)
        np.fill_diagonal(gamma, 0.0)
        return RateMatrix(gamma=gamma)

    def joint_rates_at(self, t2: float) -> RateMatrix:
        """Qudit (x) ancilla product rates: independent baths add."""
        k = self.n_errors
        gq = self.rates_at(t2).gamma
        ga = self.ancilla_rates_at(t2).gamma
        joint = np.kron(gq, np.ones((k, k))) + np.kron(np.ones((self.d, self.d)), ga)
        return RateMatrix(gamma=joint)

    # -- state helpers ------------------------------------------------------

    def logical_state(self, alpha: complex, beta: complex) -> np.ndarray:
        return alpha * self.error_basis.word(0, 0) + beta * self.error_basis.word(1, 0)

    def planar_gate(self, theta: float, phi: float) -> tuple[GeneratorMatrix, float]:
        gen = planar_generator(theta, phi, self.error_basis)
        return gen, gate_duration(gen, self.rabi_max)

    def compile_operation(self, spec: LogicalGateSpec) -> tuple[GeneratorMatrix, float]:
        """Generator and duration for any LogicalGateSpec."""
        if spec.kind == "planar":
            return self.planar_gate(spec.theta, spec.phi)
        if spec.kind == "cu":
            return self.cu_gen, self.tau_cu
        if spec.kind == "recovery":
            if not spec.k < self.n_errors:
                raise ValueError(f"syndrome index {spec.k} out of range")
            if spec.k == 0:
                return GeneratorMatrix(h_tilde=np.zeros((self.d, self.d))), 0.0
            return self.recovery_gens[spec.k], self.recovery_taus[spec.k]
        return self.prep_gen, self.tau_prep


_RABI_CACHE: dict[str, float] = {}
_SYSTEM_CACHE: dict[tuple[str, int], LogicalQubitSystem] = {}


def config_key(cfg: RunConfig) -> str:
    if cfg.raw:
        blob = json.dumps(cfg.raw, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()
    return f"id-{id(cfg)}"


def calibrated_rabi_max(cfg: RunConfig) -> float:
    """Drive amplitude such that the d=4 reference planar gate lasts gate_time.

    The same amplitude is used for every d and for the uncorrected spin-1/2
    baseline, so durations are comparable across encodings.
    """
    key = config_key(cfg)
    if key in _RABI_CACHE:
        return _RABI_CACHE[key]
    h = build_hamiltonian(cfg.topology)
    eig = diagonalize(h)
    basis = select_qudit_basis(eig, 4, topology=None)
    z = sz_diagonal_elements(eig, basis, cfg.topology)
    spec = calibrate_to_t2(cfg.dephasing)
    rates = compute_rates(z, spec)
    kraus = kraus_decompose(rates, cfg.drive.gate_time)
    cw = solve_codewords(kraus, 2, 4)
    eb = build_error_basis(cw, kraus, 2)
    theta, phi = cfg.drive.calibration_gate
    gen = planar_generator(theta, phi, eb)
    max_area = gate_duration(gen, 1.0)  # rabi 1 -> duration equals max area
    rabi = max_area / cfg.drive.gate_time
    _RABI_CACHE[key] = rabi
    return rabi


def build_system(cfg: RunConfig, d: int) -> LogicalQubitSystem:
    """Cached constructor; systems are immutable once built."""
    key = (config_key(cfg), d)
    if key not in _SYSTEM_CACHE:
        _SYSTEM_CACHE[key] = LogicalQubitSystem(cfg, d)
    return _SYSTEM_CACHE[key]


# -- protocol steps ----------------------------------------------------------


def _evolve(
    rho: DensityMatrix,
    gen: GeneratorMatrix,
    tau: float,
    rates: RateMatrix,
    integrator: IntegratorConfig,
) -> DensityMatrix:
    if tau == 0.0:
        return rho
    seg = EvolutionSegment(h_eff=gen.h_tilde / tau, duration=tau, gamma=rates)
    return evolve_segment(rho, seg, integrator)


def encode(
    system: LogicalQubitSystem,
    t2: float,
    acceptance_floor: float = 0.5,
) -> tuple[DensityMatrix, float]:
    """Drive ground -> |0,0>, post-select ell = 0, then syndrome 0.

    Returns the normalized post-selected state and the total acceptance
    probability.  Projective readouts are treated as instantaneous and
    error-free here; the measurement-error model enters the cycle through
    the syndrome vote, not the encoding post-selection.
    """
    d = system.d
    ground = np.zeros(d, dtype=complex)
    ground[0] = 1.0
    rho = DensityMatrix.pure(ground)
    rates = system.rates_at(t2)
    rho = _evolve(rho, system.prep_gen, system.tau_prep, rates, system.integrator)

    support0 = list(system.codewords.support0)
    proj = np.zeros((d, d))
    proj[support0, support0] = 1.0
    m = proj @ rho.matrix @ proj
    p_ell0 = float(np.trace(m).real)
    rho = DensityMatrix(matrix=m / p_ell0)

    branches, _ = stabilize_and_measure(system, rho, t2, MeasurementModel())
    weight0 = 0.0
    state0 = None
    for label, prob, state in branches:
        if label == 0:
            weight0 = prob
            state0 = state
    acceptance = p_ell0 * weight0
    if state0 is None or acceptance < acceptance_floor:
        raise RuntimeError(
            f"encoding acceptance {acceptance:.3e} below floor {acceptance_floor}"
        )
    return state0, acceptance


def apply_logical_gate(
    system: LogicalQubitSystem,
    rho: DensityMatrix,
    theta: float,
    phi: float,
    t2: float,
) -> DensityMatrix:
    """One ET planar rotation under concurrent dephasing."""
    gen, tau = system.planar_gate(theta, phi)
    return _evolve(rho, gen, tau, system.rates_at(t2), system.integrator)


def stabilize_and_measure(
    system: LogicalQubitSystem,
    rho: DensityMatrix,
    t2: float,
    model: MeasurementModel,
) -> tuple[list[tuple[int, float, DensityMatrix]], np.ndarray]:
    """Attach the ancilla, run CU under dephasing, measure, majority-vote.

    Returns the branches as (voted label, probability, post-state with the
    ancilla traced out), branches below weight 1e-12 pruned, plus the true
    Born distribution over syndromes.
    """
    d, k = system.d, system.n_errors
    anc0 = np.zeros((k, k), dtype=complex)
    anc0[0, 0] = 1.0
    joint = DensityMatrix(matrix=np.kron(rho.matrix, anc0))
    joint = _evolve(
        joint, system.cu_gen, system.tau_cu, system.joint_rates_at(t2), system.integrator
    )
    blocks = joint.matrix.reshape(d, k, d, k)
    born = np.array([float(np.trace(blocks[:, a, :, a]).real) for a in range(k)])
    total = born.sum()
    if abs(total - 1.0) > 1e-9:
        raise RuntimeError(f"syndrome branch weights sum to {total}, not 1")

    vote = majority_vote_matrix(k, model)
    branches = []
    for label in range(k):
        weighted = np.zeros((d, d), dtype=complex)
        for true in range(k):
            if born[true] * vote[true, label] > 0.0:
                weighted += vote[true, label] * blocks[:, true, :, true]
        prob = float(np.trace(weighted).real)
        if prob < BRANCH_PRUNE:
            continue
        branches.append((label, prob, DensityMatrix(matrix=weighted / prob)))
    return branches, born


def recover(
    system: LogicalQubitSystem,
    rho: DensityMatrix,
    k: int,
    t2: float,
    branch_weight: float = 1.0,
) -> DensityMatrix:
    """Map the stabilized sector k back to the code block (identity for k=0).

    Branches far below unit weight carry renormalization-amplified numerical
    noise (absolute noise / weight), so the positivity validation is skipped
    for them; the recombined full-weight state is validated by the caller.
    """
    if k == 0:
        return rho
    gen = system.recovery_gens[k]
    tau = system.recovery_taus[k]
    integrator = system.integrator
    if branch_weight < 1e-6:
        integrator = replace(integrator, validate_positivity=False)
    return _evolve(rho, gen, tau, system.rates_at(t2), integrator)


def decode(system: LogicalQubitSystem, rho: DensityMatrix) -> DecodedState:
    """Logical tomography in the error-word basis.

    ``block`` is the (ell,0) code-block matrix; ``traced`` sums the logical
    content over all syndrome sectors (supports are disjoint, so the ell
    label is syndrome-independent).
    """
    w = system.error_basis.vectors
    k = system.n_errors
    overlaps = w.conj().T @ rho.matrix @ w
    block = np.array(
        [[overlaps[0, 0], overlaps[0, k]], [overlaps[k, 0], overlaps[k, k]]]
    )
    traced = np.zeros((2, 2), dtype=complex)
    for kk in range(k):
        traced += np.array(
            [
                [overlaps[kk, kk], overlaps[kk, k + kk]],
                [overlaps[k + kk, kk], overlaps[k + kk, k + kk]],
            ]
        )
    span_leak = 1.0 - float(np.trace(overlaps).real)
    pops = np.real(np.diag(rho.matrix))
    p0 = float(pops[list(system.codewords.support0)].sum())
    p1 = float(pops[list(system.codewords.support1)].sum())
    return DecodedState(
        block=block,
        traced=traced,
        block_leakage=1.0 - float(np.trace(block).real),
        span_leakage=span_leak,
        support_populations=(p0, p1),
    )


def run_cycle(
    system: LogicalQubitSystem,
    theta: float,
    phi: float,
    t2: float,
    model: MeasurementModel | None = None,
    noisy_prep: bool = False,
) -> CycleReport:
    """One gate + stabilization + recovery cycle, cardinal-state averaged."""
    if model is None:
        model = MeasurementModel(system.cfg.measurement.p_m, system.cfg.measurement.n_rep)
    g = planar_rotation(theta, phi)
    fidelities = []
    block_fidelities = []
    syndromes = np.zeros(system.n_errors)
    leakages = []
    acceptance = 1.0
    for alpha, beta in CARDINAL_STATES:
        if noisy_prep:
            rho, acc = encode(system, t2)
            acceptance = min(acceptance, acc)
            rho = _prepare_cardinal(system, rho, alpha, beta, t2)
        else:
            rho = DensityMatrix.pure(system.logical_state(alpha, beta))
        rho = apply_logical_gate(system, rho, theta, phi, t2)
        branches, born = stabilize_and_measure(system, rho, t2, model)
        final = np.zeros((system.d, system.d), dtype=complex)
        weight = 0.0
        for label, prob, state in branches:
            recovered = recover(system, state, label, t2, branch_weight=prob)
            final += prob * recovered.matrix
            weight += prob
            syndromes[label] += prob / len(CARDINAL_STATES)
        rho_final = DensityMatrix(matrix=final / weight).validate(system.integrator)
        decoded = decode(system, rho_final)
        ideal = g @ np.array([alpha, beta], dtype=complex)
        fidelities.append(float(np.real(ideal.conj() @ decoded.traced @ ideal)))
        block_fidelities.append(float(np.real(ideal.conj() @ decoded.block @ ideal)))
        leakages.append(decoded.span_leakage)
    f_e = float(np.mean(fidelities))
    block_f_e = float(np.mean(block_fidelities))
    return CycleReport(
        d=system.d,
        t2=t2,
        theta=theta,
        phi=phi,
        syndrome_distribution=syndromes,
        fidelity_per_state=tuple(fidelities),
        f_e=f_e,
        e_e=1.0 - f_e ** 2,
        block_f_e=block_f_e,
        block_e_e=1.0 - block_f_e ** 2,
        acceptance_probability=acceptance,
        leakage=float(np.mean(leakages)),
    )


def _prepare_cardinal(system, rho, alpha, beta, t2):
    theta = 2.0 * np.arccos(np.clip(abs(alpha), 0.0, 1.0))
    if theta < 1e-12:
        return rho
    phi = float(np.angle(beta / alpha)) if abs(alpha) > 1e-12 else 0.0
    return apply_logical_gate(system, rho, theta, phi, t2)


def entanglement_error(
    system: LogicalQubitSystem,
    t2: float,
    model: MeasurementModel | None = None,
    gates=PAPER_GATE_SET,
    noisy_prep: bool = False,
) -> CycleReport:
    """Cycle error averaged over the planar-rotation gate set."""
    reports = [
        run_cycle(system, theta, phi, t2, model, noisy_prep) for theta, phi in gates
    ]
    f_e = float(np.mean([r.f_e for r in reports]))
    block_f_e = float(np.mean([r.block_f_e for r in reports]))
    return CycleReport(
        d=system.d,
        t2=t2,
        theta=np.nan,
        phi=np.nan,
        syndrome_distribution=np.mean([r.syndrome_distribution for r in reports], axis=0),
        fidelity_per_state=tuple(
            float(np.mean([r.fidelity_per_state[i] for r in reports]))
            for i in range(len(CARDINAL_STATES))
        ),
        f_e=f_e,
        e_e=float(np.mean([r.e_e for r in reports])),
        block_f_e=block_f_e,
        block_e_e=float(np.mean([r.block_e_e for r in reports])),
        acceptance_probability=float(np.min([r.acceptance_probability for r in reports])),
        leakage=float(np.mean([r.leakage for r in reports])),
    )


def uncorrected_baseline(
    theta: float,
    phi: float,
    t2: float,
    rabi_max: float,
    integrator: IntegratorConfig | None = None,
) -> CycleReport:
    """Bare spin-1/2 rotation under dephasing gamma_01 = 1/T2.

    Same drive amplitude as the logical qubit; the pulse area theta sets the
    duration theta / rabi_max.  Same cardinal-state fidelity metric.
    """
    integrator = integrator or IntegratorConfig()
    tau = theta / rabi_max
    g = planar_rotation(theta, phi)
    off = -1j * np.exp(-1j * phi) * theta / 2.0
    h2 = np.array([[0.0, off], [np.conj(off), 0.0]])
    gamma = RateMatrix(gamma=np.array([[0.0, 1.0 / t2], [1.0 / t2, 0.0]]))
    fidelities = []
    for alpha, beta in CARDINAL_STATES:
        rho = DensityMatrix.pure(np.array([alpha, beta], dtype=complex))
        if tau > 0:
            seg = EvolutionSegment(h_eff=h2 / tau, duration=tau, gamma=gamma)
            rho = evolve_segment(rho, seg, integrator)
        ideal = g @ np.array([alpha, beta], dtype=complex)
        fidelities.append(rho.fidelity_with(ideal))
    f_e = float(np.mean(fidelities))
    return CycleReport(
        d=2,
        t2=t2,
        theta=theta,
        phi=phi,
        syndrome_distribution=np.zeros(1),
        fidelity_per_state=tuple(fidelities),
        f_e=f_e,
        e_e=1.0 - f_e ** 2,
        block_f_e=f_e,
        block_e_e=1.0 - f_e ** 2,
        acceptance_probability=1.0,
        leakage=0.0,
    )


def baseline_gate_average(
    t2: float,
    rabi_max: float,
    gates=PAPER_GATE_SET,
    integrator: IntegratorConfig | None = None,
) -> CycleReport:
    """Gate-set average of the uncorrected baseline."""
    reports = [uncorrected_baseline(th, ph, t2, rabi_max, integrator) for th, ph in gates]
    f_e = float(np.mean([r.f_e for r in reports]))
    e_e = float(np.mean([r.e_e for r in reports]))
    return CycleReport(
        d=2,
        t2=t2,
        theta=np.nan,
        phi=np.nan,
        syndrome_distribution=np.zeros(1),
        fidelity_per_state=tuple(
            float(np.mean([r.fidelity_per_state[i] for r in reports]))
            for i in range(len(CARDINAL_STATES))
        ),
        f_e=f_e,
        e_e=e_e,
        block_f_e=f_e,
        block_e_e=e_e,
        acceptance_probability=1.0,
        leakage=0.0,
    )
