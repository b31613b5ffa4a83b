"""Error-transparent compilation of logical operations into pulse schedules.

Every logical operation is realized in a single step by a Hermitian generator
H_tilde with exp(-i H_tilde) = U; the generator's off-diagonal elements map
one-to-one onto simultaneous resonant pulses (area 2|H_mn|, phase
arg(H_mn), frequency E_n - E_m).  Gates built from the error basis act as
G (x) I_K across the error words, so errors commute through them.

Planar rotations are compiled from their analytic generator
(theta/2)(cos(phi) Y_L - sin(phi) X_L) (x) I_K rather than a numerical
matrix logarithm; this keeps the 2*pi rotation needed by the controlled-phase
gate a genuine driven loop with a zero-diagonal generator.  The generic
``generator_of`` uses the principal branch (-pi, pi] with -1 mapped to +pi.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur

from .code_synthesis import ErrorBasis

_UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class LogicalGateSpec:
    """One logical operation: planar rotation, stabilization, recovery, prep.

    ``kind`` is one of "planar" (theta, phi), "cu", "recovery" (k) or
    "encode_prep".  Compilation against a specific error basis happens in
    the protocol layer.
    """

    kind: str
    theta: float = 0.0
    phi: float = 0.0
    k: int = 0

    def __post_init__(self):
        if self.kind not in ("planar", "cu", "recovery", "encode_prep"):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "planar" and not 0.0 <= self.theta < 4.0 * np.pi:
            raise ValueError("planar rotation angle must lie in [0, 4*pi)")
        if self.kind == "recovery" and self.k < 0:
            raise ValueError("recovery syndrome index must be nonnegative")


@dataclass(frozen=True)
class GeneratorMatrix:
    """Hermitian single-step drive generator, in pulse-area units."""

    h_tilde: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h_tilde, dtype=complex)
        if np.abs(h - h.conj().T).max() > 1e-12 * max(1.0, np.abs(h).max()):
            raise ValueError("generator must be Hermitian")
        object.__setattr__(self, "h_tilde", h)

    @property
    def dim(self) -> int:
        return self.h_tilde.shape[0]

    def max_diagonal(self) -> float:
        return float(np.abs(np.diag(self.h_tilde)).max())

    def unitary(self) -> np.ndarray:
        """exp(-i H_tilde)."""
        evals, evecs = np.linalg.eigh(self.h_tilde)
        return (evecs * np.exp(-1j * evals)[None, :]) @ evecs.conj().T


@dataclass(frozen=True)
class Pulse:
    level_pair: tuple[int, int]
    area: float
    phase: float
    frequency: float


@dataclass(frozen=True)
class PulseSchedule:
    """Simultaneous resonant pulses realizing exp(-i H_tilde) in time tau."""

    pulses: tuple[Pulse, ...]
    duration: float
    rabi_max: float
    min_frequency_separation: float
    linewidth_warning: bool

    @property
    def n_pulses(self) -> int:
        return len(self.pulses)

    def to_dict(self) -> dict:
        return {
            "pulses": [
                {
                    "levels": list(p.level_pair),
                    "area": p.area,
                    "phase": p.phase,
                    "frequency": p.frequency,
                }
                for p in self.pulses
            ],
            "duration": self.duration,
            "rabi_max": self.rabi_max,
            "min_frequency_separation": self.min_frequency_separation,
            "linewidth_warning": self.linewidth_warning,
        }


def _check_unitary(u: np.ndarray, tol: float = _UNITARITY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    dim = u.shape[0]
    if np.abs(u.conj().T @ u - np.eye(dim)).max() > tol:
        raise ValueError("matrix is not unitary")
    return u


def planar_rotation(theta: float, phi: float) -> np.ndarray:
    """2x2 logical planar rotation exp[-i (cos(phi) Y - sin(phi) X) theta/2]."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array(
        [[c, -s * np.exp(-1j * phi)], [s * np.exp(1j * phi), c]], dtype=complex
    )


def embed_logical(g: np.ndarray, basis: ErrorBasis) -> np.ndarray:
    """Extend a 2x2 logical gate to G (x) I_K on the error words.

    Acts as the identity on the orthogonal complement of the error span
    inside the qudit space (those states are never driven).
    """
    g = _check_unitary(g, 1e-12)
    k = basis.n_errors
    w = basis.vectors
    block = np.kron(g, np.eye(k, dtype=complex))
    return w @ block @ w.conj().T + (np.eye(basis.dim) - w @ w.conj().T)


def embed_logical_generator(gen2: np.ndarray, basis: ErrorBasis) -> GeneratorMatrix:
    """Lift a 2x2 Hermitian logical generator to gen2 (x) I_K on the error words."""
    gen2 = np.asarray(gen2, dtype=complex)
    k = basis.n_errors
    w = basis.vectors
    h = w @ np.kron(gen2, np.eye(k, dtype=complex)) @ w.conj().T
    return GeneratorMatrix(h_tilde=0.5 * (h + h.conj().T))


def planar_generator(theta: float, phi: float, basis: ErrorBasis) -> GeneratorMatrix:
    """Analytic ET generator of the logical planar rotation R(theta, phi)."""
    off = -1j * np.exp(-1j * phi) * theta / 2.0
    gen2 = np.array([[0.0, off], [np.conj(off), 0.0]])
    return embed_logical_generator(gen2, basis)


def cu_unitary(basis: ErrorBasis, n_ancilla: int | None = None) -> np.ndarray:
    """Syndrome-extraction gate on qudit (x) ancilla.

    Maps |ell,k>|0> -> |ell,k>|k> and |ell,k>|k> -> -|ell,k>|0> for k >= 1,
    identity otherwise (the k = 0 sector is untouched).  The sign makes the
    generator diagonal-free; since the ancilla starts in |0> it is otherwise
    irrelevant.
    """
    k_err = basis.n_errors
    if n_ancilla is None:
        n_ancilla = k_err
    if n_ancilla != k_err:
        raise ValueError("ancilla dimension must equal the number of corrected errors")
    d = basis.dim
    dim = d * n_ancilla
    v = np.eye(dim, dtype=complex)
    anc = np.eye(n_ancilla, dtype=complex)
    for ell in (0, 1):
        for k in range(1, k_err):
            u1 = np.kron(basis.word(ell, k), anc[:, 0])
            u2 = np.kron(basis.word(ell, k), anc[:, k])
            v += (
                np.outer(u2, u1.conj())
                - np.outer(u1, u2.conj())
                - np.outer(u1, u1.conj())
                - np.outer(u2, u2.conj())
            )
    return v


def recovery_unitary(basis: ErrorBasis, k: int) -> np.ndarray:
    """Map |ell,k> -> |ell,0> (and |ell,0> -> -|ell,k>) inside each ell block.

    k = 0 is the trivial recovery and returns the identity.  The block form
    is I_2 (x) R_k: no evolution between different ell subspaces.
    """
    if not 0 <= k < basis.n_errors:
        raise ValueError(f"syndrome index {k} out of range")
    v = np.eye(basis.dim, dtype=complex)
    if k == 0:
        return v
    for ell in (0, 1):
        w0 = basis.word(ell, 0)
        wk = basis.word(ell, k)
        v += (
            np.outer(w0, wk.conj())
            - np.outer(wk, w0.conj())
            - np.outer(wk, wk.conj())
            - np.outer(w0, w0.conj())
        )
    return v


def preparation_unitary(basis: ErrorBasis, ground_index: int = 0) -> np.ndarray:
    """Rotate the qudit ground eigenstate into the code word |0,0>."""
    dim = basis.dim
    u = np.zeros(dim, dtype=complex)
    u[ground_index] = 1.0
    t = basis.word(0, 0)
    c = np.vdot(u, t)
    # Align phases so the rotation plane is real in the (u, t) pair.
    if abs(c) > 1e-12:
        t = t * (abs(c) / c)
        c = abs(c)
    resid = t - c * u
    norm = np.linalg.norm(resid)
    if norm < 1e-12:
        return np.eye(dim, dtype=complex)
    b = resid / norm
    alpha = np.arccos(np.clip(np.real(c), -1.0, 1.0))
    v = np.eye(dim, dtype=complex)
    v += (np.cos(alpha) - 1.0) * (np.outer(u, u.conj()) + np.outer(b, b.conj()))
    v += np.sin(alpha) * (np.outer(b, u.conj()) - np.outer(u, b.conj()))
    return v


def generator_of(v: np.ndarray) -> GeneratorMatrix:
    """H_tilde = i log V through the Schur form of the unitary.

    Eigenphases are taken in (-pi, pi] with eigenvalue -1 assigned phase +pi,
    which makes logical 2*pi rotations well defined and deterministic.
    """
    v = _check_unitary(v)
    t, q = schur(v, output="complex")
    off = np.abs(t - np.diag(np.diag(t))).max()
    eigs = np.diag(t)
    phases = -np.angle(eigs)
    phases = np.where(phases <= -np.pi, phases + 2.0 * np.pi, phases)
    h = (q * phases[None, :]) @ q.conj().T
    h = 0.5 * (h + h.conj().T)
    recon = (q * np.exp(-1j * phases)[None, :]) @ q.conj().T
    residual = max(np.abs(recon - v).max(), off)
    if residual > 1e-9:
        raise ValueError(
            f"generator reconstruction failed (residual {residual:.3e}); "
            "degenerate eigenvalue pathology"
        )
    return GeneratorMatrix(h_tilde=h)


def schedule_pulses(
    generator: GeneratorMatrix,
    energies: np.ndarray,
    rabi_max: float,
    linewidth_factor: float = 1.0,
    diag_tol: float = 1e-9,
    area_tol: float = 1e-12,
) -> PulseSchedule:
    """Translate a zero-diagonal generator into simultaneous resonant pulses.

    One pulse per nonzero off-diagonal pair (m < n): area 2|H_mn|, phase
    arg(H_mn), frequency E_n - E_m.  The common duration is
    max_area / rabi_max.  A warning flag is set when two driven transitions
    are closer in frequency than ``linewidth_factor`` times the drive
    linewidth 2*pi/tau (the gaps are then not spectroscopically
    distinguishable at this pulse length).
    """
    if rabi_max <= 0:
        raise ValueError("rabi_max must be positive")
    h = generator.h_tilde
    energies = np.asarray(energies, dtype=float)
    if len(energies) != generator.dim:
        raise ValueError("energies must match the generator dimension")
    scale = max(np.abs(h).max(), 1.0)
    if generator.max_diagonal() > diag_tol * scale:
        raise ValueError(
            f"generator has diagonal elements up to {generator.max_diagonal():.3e}; "
            "not realizable with resonant drives alone"
        )
    pulses = []
    dim = generator.dim
    for m in range(dim):
        for n in range(m + 1, dim):
            area = 2.0 * abs(h[m, n])
            if area <= area_tol:
                continue
            phase = float(np.angle(h[m, n]))
            if phase <= -np.pi:
                phase += 2.0 * np.pi
            pulses.append(
                Pulse(
                    level_pair=(m, n),
                    area=float(area),
                    phase=phase,
                    frequency=float(energies[n] - energies[m]),
                )
            )
    if not pulses:
        return PulseSchedule(
            pulses=(),
            duration=0.0,
            rabi_max=rabi_max,
            min_frequency_separation=np.inf,
            linewidth_warning=False,
        )
    tau = max(p.area for p in pulses) / rabi_max
    freqs = sorted(abs(p.frequency) for p in pulses)
    seps = [b - a for a, b in zip(freqs, freqs[1:])]
    min_sep = min(seps) if seps else np.inf
    linewidth = 2.0 * np.pi / tau if tau > 0 else 0.0
    warning = bool(min_sep < linewidth_factor * linewidth)
    return PulseSchedule(
        pulses=tuple(pulses),
        duration=tau,
        rabi_max=rabi_max,
        min_frequency_separation=float(min_sep),
        linewidth_warning=warning,
    )


def gate_duration(generator: GeneratorMatrix, rabi_max: float) -> float:
    """Duration of the compiled schedule without building the pulse list."""
    h = np.abs(generator.h_tilde.copy())
    np.fill_diagonal(h, 0.0)
    return float(2.0 * h.max() / rabi_max)
