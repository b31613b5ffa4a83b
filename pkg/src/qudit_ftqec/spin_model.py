"""Molecular spin-cluster Hamiltonian: construction, diagonalization, qudit selection.

The physical carrier is a cluster of exchange-coupled spins (Heisenberg +
axial antisymmetric exchange + Zeeman).  Its low-energy eigenstates form the
qudit; downstream modules only consume the eigenvalues, the eigenvectors and
the diagonal matrix elements of the local s^z operators.

All operators are dense; the Hilbert dimension is capped (default 4096), so
dense eigensolvers are both simpler and fast enough.
"""

from dataclasses import dataclass, field

import numpy as np

from .constants import MU_B

DEFAULT_DIMENSION_CAP = 4096

# Tolerance for locating the first "nonzero" eigenvector component when
# applying the deterministic phase convention.
_PHASE_TOL = 1e-12


def spin_matrices(s: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (sx, sy, sz) for a single spin s, basis ordered m = s .. -s."""
    dim = int(round(2 * s + 1))
    if abs(2 * s - round(2 * s)) > 1e-12 or dim < 1:
        raise ValueError(f"invalid spin quantum number {s}")
    m = s - np.arange(dim)
    sz = np.diag(m).astype(complex)
    # <s, m-1| s^- |s, m> = sqrt(s(s+1) - m(m-1))
    lowering = np.sqrt(s * (s + 1) - m[:-1] * (m[:-1] - 1))
    sm = np.zeros((dim, dim), dtype=complex)
    sm[np.arange(1, dim), np.arange(dim - 1)] = lowering
    sp = sm.conj().T
    sx = 0.5 * (sp + sm)
    sy = -0.5j * (sp - sm)
    return sx, sy, sz


@dataclass(frozen=True)
class SpinTopology:
    """Spin cluster definition.

    Couplings are stored in angular-frequency units (rad/s); use
    :func:`qudit_ftqec.config.load_config` to read the GHz-based JSON
    format.  ``heisenberg_couplings`` and ``dm_couplings`` are lists of
    ``(i, j, value)`` with 0-based site indices.
    """

    spins: tuple[float, ...]
    heisenberg_couplings: tuple[tuple[int, int, float], ...]
    dm_couplings: tuple[tuple[int, int, float], ...] = ()
    g_factors: tuple[float, ...] = ()
    field_b: float = 0.0
    dimension_cap: int = DEFAULT_DIMENSION_CAP

    def __post_init__(self):
        n = len(self.spins)
        if n == 0:
            raise ValueError("topology needs at least one site")
        for s in self.spins:
            if abs(2 * s - round(2 * s)) > 1e-12 or s <= 0:
                raise ValueError(f"site spin {s} is not a positive half-integer")
        g = self.g_factors if self.g_factors else tuple([2.0] * n)
        object.__setattr__(self, "g_factors", g)
        if len(self.g_factors) != n:
            raise ValueError("g_factors length must match number of sites")
        seen = set()
        for name, pairs in (("J", self.heisenberg_couplings), ("D", self.dm_couplings)):
            for (i, j, _val) in pairs:
                if i == j:
                    raise ValueError(f"{name} coupling with i == j == {i}")
                if not (0 <= i < n and 0 <= j < n):
                    raise ValueError(f"{name} coupling ({i},{j}) out of range")
                key = (name, min(i, j), max(i, j))
                if key in seen:
                    raise ValueError(f"duplicate {name} coupling for pair ({i},{j})")
                seen.add(key)
        if self.dimension > self.dimension_cap:
            raise ValueError(
                f"Hilbert dimension {self.dimension} exceeds cap {self.dimension_cap}"
            )

    @property
    def n_sites(self) -> int:
        return len(self.spins)

    @property
    def dimension(self) -> int:
        dim = 1
        for s in self.spins:
            dim *= int(round(2 * s + 1))
        return dim


def site_operator(topology: SpinTopology, site: int, op: np.ndarray) -> np.ndarray:
    """Embed a single-site operator into the full tensor-product space."""
    mats = []
    for k, s in enumerate(topology.spins):
        dim_k = int(round(2 * s + 1))
        mats.append(op if k == site else np.eye(dim_k, dtype=complex))
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def site_spin_operators(topology: SpinTopology) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Full-space (sx, sy, sz) for every site."""
    ops = []
    for k, s in enumerate(topology.spins):
        sx, sy, sz = spin_matrices(s)
        ops.append(tuple(site_operator(topology, k, o) for o in (sx, sy, sz)))
    return ops


def build_hamiltonian(topology: SpinTopology) -> np.ndarray:
    """H = sum J_ij s_i.s_j + sum D_ij (s_i x s_j)_z + mu_B B sum g_i s_i^z.

    Returns a dense Hermitian matrix in the tensor-product basis, in
    angular-frequency units.
    """
    ops = site_spin_operators(topology)
    dim = topology.dimension
    h = np.zeros((dim, dim), dtype=complex)
    for (i, j, jij) in topology.heisenberg_couplings:
        for a in range(3):
            h += jij * (ops[i][a] @ ops[j][a])
    for (i, j, dij) in topology.dm_couplings:
        h += dij * (ops[i][0] @ ops[j][1] - ops[i][1] @ ops[j][0])
    if topology.field_b != 0.0:
        for k in range(topology.n_sites):
            h += MU_B * topology.field_b * topology.g_factors[k] * ops[k][2]
    herm_residual = np.linalg.norm(h - h.conj().T)
    scale = max(np.linalg.norm(h), 1.0)
    if herm_residual > 1e-12 * scale:
        raise ValueError(f"Hamiltonian hermiticity residual {herm_residual:.3e}")
    return h


def total_spin_squared(topology: SpinTopology) -> np.ndarray:
    """Operator S_tot^2 = (sum_i s_i)^2 on the full space."""
    ops = site_spin_operators(topology)
    dim = topology.dimension
    out = np.zeros((dim, dim), dtype=complex)
    for a in range(3):
        total = np.zeros((dim, dim), dtype=complex)
        for k in range(topology.n_sites):
            total += ops[k][a]
        out += total @ total
    return out


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (ascending, rad/s) and eigenvector columns of the cluster."""

    energies: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.energies)

    def state(self, i: int) -> np.ndarray:
        return self.eigenvectors[:, i]


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    """Make the first component above tolerance of each column real positive."""
    out = vecs.copy()
    for col in range(out.shape[1]):
        v = out[:, col]
        idx = np.flatnonzero(np.abs(v) > _PHASE_TOL)
        if idx.size == 0:
            continue
        lead = v[idx[0]]
        out[:, col] = v * (abs(lead) / lead)
    return out


def diagonalize(h: np.ndarray) -> EigenSystem:
    """Dense Hermitian eigendecomposition with a deterministic phase convention."""
    scale = max(np.linalg.norm(h), 1.0)
    if np.linalg.norm(h - h.conj().T) > 1e-10 * scale:
        raise ValueError("matrix is not Hermitian")
    energies, vecs = np.linalg.eigh(h)
    vecs = _fix_phases(vecs)
    residual = np.linalg.norm(h @ vecs - vecs * energies[None, :])
    if residual > 1e-9 * scale:
        raise ValueError(f"eigensolver residual {residual:.3e} too large")
    return EigenSystem(energies=energies, eigenvectors=vecs)


@dataclass(frozen=True)
class QuditBasis:
    """The d eigenstates forming the qudit, with total-spin diagnostics."""

    indices: tuple[int, ...]
    spin_labels: tuple[float, ...] = field(default=())

    @property
    def d(self) -> int:
        return len(self.indices)


def select_qudit_basis(
    eig: EigenSystem,
    d: int,
    topology: SpinTopology | None = None,
    gap_check: bool = True,
    gap_tolerance: float = 0.1,
) -> QuditBasis:
    """Pick the lowest d eigenstates as the qudit.

    ``d`` must be even and at least 4.  With ``gap_check`` enabled the
    selection fails when the spacing between state d-1 and state d is below
    ``gap_tolerance`` times the mean adjacent spacing inside the selected set,
    i.e. when the qudit boundary would cut through a near-degenerate group.
    Spin labels S (from <S^2> = S(S+1)) are attached when a topology is given.
    """
    if d % 2 != 0:
        raise ValueError(f"qudit dimension d={d} must be even")
    if not 4 <= d <= eig.dim:
        raise ValueError(f"qudit dimension d={d} out of range [4, {eig.dim}]")
    indices = tuple(range(d))
    if gap_check and d < eig.dim:
        spacings = np.diff(eig.energies[:d])
        mean_spacing = float(np.mean(spacings)) if spacings.size else 0.0
        boundary_gap = float(eig.energies[d] - eig.energies[d - 1])
        if mean_spacing > 0 and boundary_gap < gap_tolerance * mean_spacing:
            raise ValueError(
                f"gap check failed: boundary gap {boundary_gap:.3e} < "
                f"{gap_tolerance} x mean spacing {mean_spacing:.3e}"
            )
    labels: tuple[float, ...] = ()
    if topology is not None:
        s2 = total_spin_squared(topology)
        vals = []
        for i in indices:
            v = eig.state(i)
            exp_s2 = float(np.real(v.conj() @ (s2 @ v)))
            vals.append(0.5 * (np.sqrt(1.0 + 4.0 * exp_s2) - 1.0))
        labels = tuple(vals)
    return QuditBasis(indices=indices, spin_labels=labels)


def sz_diagonal_elements(
    eig: EigenSystem, basis: QuditBasis, topology: SpinTopology
) -> np.ndarray:
    """Z[i][k] = <d_i| s_k^z |d_i> for each qudit state i and site k.

    These real diagonal profiles fully determine the pure-dephasing rates.
    """
    ops = site_spin_operators(topology)
    z = np.zeros((len(basis.indices), topology.n_sites))
    for row, i in enumerate(basis.indices):
        v = eig.state(i)
        for k in range(topology.n_sites):
            z[row, k] = float(np.real(v.conj() @ (ops[k][2] @ v)))
    return z
