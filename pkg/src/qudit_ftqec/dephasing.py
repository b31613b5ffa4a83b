"""Pure-dephasing channel on the qudit eigenbasis.

Off-diagonal density-matrix elements decay as rho_ij(t) = rho_ij(0)
exp(-gamma_ij t); populations are untouched.  The rates derive from the
eigenstate s^z profiles and a site-pair correlation matrix C:

    gamma_ij = sum_kk' C_kk' [Z_ik Z_ik' + Z_jk Z_jk' - 2 Z_ik Z_jk']
             = (w_i - w_j)^T C (w_i - w_j),   w_i = Z[i, :]

which is entrywise nonnegative for any positive-semidefinite C.  At a fixed
snapshot time the channel is encoded by the decoherence matrix
Lambda_ij = exp(-gamma_ij t); its eigendecomposition yields the ordered
diagonal Kraus hierarchy used by the code-synthesis stage.
"""

from dataclasses import dataclass, replace

import numpy as np

DEFAULT_KRAUS_CUTOFF = 1e-14


@dataclass(frozen=True)
class DephasingSpec:
    """Site-pair correlation matrix C (1/s) and the reference coherence time.

    ``t2_ref`` is the T2 (seconds) that a reference spin-1/2 (g = 2,
    Z = +/-1/2) would have in the same bath; :func:`calibrate_to_t2` rescales
    C so this holds exactly.
    """

    c_matrix: np.ndarray
    t2_ref: float

    def __post_init__(self):
        c = np.asarray(self.c_matrix, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("C must be a square matrix")
        if not np.allclose(c, c.T, atol=1e-12 * max(1.0, np.abs(c).max())):
            raise ValueError("C must be symmetric")
        if self.t2_ref <= 0:
            raise ValueError("t2_ref must be positive")
        object.__setattr__(self, "c_matrix", c)

    @property
    def n_sites(self) -> int:
        return self.c_matrix.shape[0]

    def reference_rate(self) -> float:
        """Rate 1/T2 of the single-site reference qubit in this bath.

        The multi-site C is contracted to one effective site through its mean
        self-correlation tr(C)/n; for that site, Z = +/-1/2 gives
        gamma_01 = c_ref exactly.
        """
        return float(np.trace(self.c_matrix)) / self.n_sites


@dataclass(frozen=True)
class RateMatrix:
    """Symmetric nonnegative dephasing rates (1/s), zero diagonal."""

    gamma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("gamma must be square")
        if np.abs(np.diag(g)).max(initial=0.0) > 0.0:
            raise ValueError("gamma diagonal must be exactly zero")
        if not np.allclose(g, g.T, atol=1e-10 * max(1.0, np.abs(g).max())):
            raise ValueError("gamma must be symmetric")
        if g.min(initial=0.0) < 0.0:
            raise ValueError("gamma must be entrywise nonnegative")
        object.__setattr__(self, "gamma", g)

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    def scaled(self, factor: float) -> "RateMatrix":
        return RateMatrix(gamma=self.gamma * factor)


def compute_rates(z: np.ndarray, spec: DephasingSpec) -> RateMatrix:
    """Dephasing rates from the eigenstate s^z profiles Z[i, k].

    Negative entries beyond -1e-12 (relative) signal an unphysical C and
    raise; floating-point dust is clipped to zero.
    """
    z = np.asarray(z, dtype=float)
    if z.shape[1] != spec.n_sites:
        raise ValueError(
            f"Z has {z.shape[1]} site columns, C expects {spec.n_sites}"
        )
    # gamma_ij = (w_i - w_j)^T C (w_i - w_j), expanded through the quadratic form
    q = z @ spec.c_matrix @ z.T
    diag = np.diag(q)
    gamma = diag[:, None] + diag[None, :] - q - q.T
    gamma = 0.5 * (gamma + gamma.T)
    np.fill_diagonal(gamma, 0.0)
    scale = max(np.abs(gamma).max(), 1.0)
    if gamma.min() < -1e-12 * scale:
        raise ValueError(
            f"negative dephasing rate {gamma.min():.3e}; C is not positive semidefinite"
        )
    gamma[gamma < 0.0] = 0.0
    return RateMatrix(gamma=gamma)


def apply_dephasing(rho: np.ndarray, rates: RateMatrix, t: float) -> np.ndarray:
    """Exact elementwise decay rho_ij -> rho_ij exp(-gamma_ij t)."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    return np.asarray(rho, dtype=complex) * np.exp(-rates.gamma * t)


def decoherence_matrix(rates: RateMatrix, t: float) -> np.ndarray:
    """Lambda_ij = exp(-gamma_ij t); unit diagonal, symmetric."""
    return np.exp(-rates.gamma * t)


@dataclass(frozen=True)
class KrausSet:
    """Diagonal Kraus operators of the dephasing channel at one snapshot time.

    ``diagonals[m]`` holds the diagonal of E_m; operators are sorted by
    descending operator norm and satisfy sum_m E_m^dag E_m = I.
    """

    diagonals: np.ndarray
    t_snapshot: float

    @property
    def n_ops(self) -> int:
        return self.diagonals.shape[0]

    @property
    def dim(self) -> int:
        return self.diagonals.shape[1]

    @property
    def ops(self) -> list[np.ndarray]:
        """Kraus operators as dense diagonal matrices."""
        return [np.diag(d) for d in self.diagonals]

    @property
    def norms(self) -> np.ndarray:
        """Operator norms ||E_m|| (max |diagonal entry|)."""
        return np.abs(self.diagonals).max(axis=1)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """sum_m E_m rho E_m^dag."""
        rho = np.asarray(rho, dtype=complex)
        out = np.zeros_like(rho)
        for d in self.diagonals:
            out += (d[:, None] * rho) * d.conj()[None, :]
        return out


def kraus_decompose(
    rates: RateMatrix, t: float, cutoff: float = DEFAULT_KRAUS_CUTOFF
) -> KrausSet:
    """Eigendecompose Lambda = exp(-gamma t) into the diagonal Kraus hierarchy.

    Eigenvalues below ``cutoff`` are dropped; a minimum eigenvalue below
    -1e-10 means the rate matrix is not a valid (conditionally negative)
    dephasing generator and raises.  Eigenvector signs follow the
    first-component-positive convention so the hierarchy is deterministic.
    """
    if t <= 0:
        raise ValueError("snapshot time must be positive")
    lam = decoherence_matrix(rates, t)
    evals, evecs = np.linalg.eigh(lam)
    if evals.min() < -1e-10:
        raise ValueError(
            f"decoherence matrix not PSD (min eigenvalue {evals.min():.3e})"
        )
    keep = evals >= cutoff
    evals, evecs = evals[keep], evecs[:, keep]
    diagonals = np.sqrt(evals)[None, :] * evecs
    diagonals = diagonals.T.astype(complex)
    for row in range(diagonals.shape[0]):
        v = diagonals[row]
        idx = np.flatnonzero(np.abs(v) > 1e-12)
        if idx.size:
            lead = v[idx[0]]
            diagonals[row] = v * (abs(lead) / lead)
    order = np.argsort(-np.abs(diagonals).max(axis=1), kind="stable")
    kraus = KrausSet(diagonals=diagonals[order], t_snapshot=t)

    completeness = (np.abs(kraus.diagonals) ** 2).sum(axis=0)
    if np.abs(completeness - 1.0).max() > 1e-10:
        raise ValueError("Kraus completeness check failed")
    probe = np.full_like(lam, 1.0 / lam.shape[0], dtype=complex)
    if np.abs(kraus.apply(probe) - apply_dephasing(probe, rates, t)).max() > 1e-10:
        raise ValueError("Kraus set does not reproduce the dephasing channel")
    return kraus


def calibrate_to_t2(spec: DephasingSpec) -> DephasingSpec:
    """Rescale C so the reference spin-1/2 dephases at exactly 1/t2_ref."""
    ref = spec.reference_rate()
    if ref <= 0:
        raise ValueError("C produces no dephasing on the reference qubit")
    factor = 1.0 / (spec.t2_ref * ref)
    return replace(spec, c_matrix=spec.c_matrix * factor)
