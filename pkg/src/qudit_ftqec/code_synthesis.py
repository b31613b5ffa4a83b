"""Knill-Laflamme code words and error basis for diagonal Kraus hierarchies.

Code words are restricted to disjoint eigenbasis supports with real
nonnegative amplitudes.  For diagonal errors this makes the off-diagonal
Knill-Laflamme condition <0|E_k^dag E_j|1> = 0 automatic, and reduces the
diagonal condition <0|E_k^dag E_j|0> = <1|E_k^dag E_j|1> to a linear system
in the squared amplitudes, solved per support partition by nonnegative least
squares.  The partition with the smallest residual wins; enumeration order is
lexicographic with index 0 pinned to the ell = 0 support, so results are
deterministic.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import nnls

from .dephasing import KrausSet

DEFAULT_RESIDUAL_THRESHOLD = 1e-8

# Weight of the normalization rows fed to NNLS; amplitudes are renormalized
# exactly afterwards, this only has to dominate the homogeneous KL rows.
_NORM_WEIGHT = 100.0


class CodeSolveError(RuntimeError):
    """No support partition reached the acceptance threshold."""

    def __init__(self, best_residual: float, threshold: float):
        super().__init__(
            f"best Knill-Laflamme residual {best_residual:.3e} exceeds "
            f"threshold {threshold:.3e}"
        )
        self.best_residual = best_residual
        self.threshold = threshold


class ErrorBasisCollapseError(RuntimeError):
    """An error word is linearly dependent on its predecessors (K too large)."""


@dataclass(frozen=True)
class CodeWords:
    """Logical |0_L>, |1_L> on disjoint supports with nonnegative amplitudes."""

    support0: tuple[int, ...]
    support1: tuple[int, ...]
    amp0: np.ndarray
    amp1: np.ndarray
    kl_residual: float

    def __post_init__(self):
        if set(self.support0) & set(self.support1):
            raise ValueError("supports must be disjoint")
        for amps in (self.amp0, self.amp1):
            if abs(np.linalg.norm(amps) - 1.0) > 1e-9:
                raise ValueError("amplitudes must be unit norm")
            if np.min(amps) < 0:
                raise ValueError("amplitudes must be nonnegative")

    def vector(self, ell: int, dim: int) -> np.ndarray:
        """Code word as a dense vector in the qudit eigenbasis."""
        support = self.support0 if ell == 0 else self.support1
        amps = self.amp0 if ell == 0 else self.amp1
        v = np.zeros(dim, dtype=complex)
        v[list(support)] = amps
        return v

    def to_dict(self) -> dict:
        return {
            "support0": list(self.support0),
            "support1": list(self.support1),
            "amp0": self.amp0.tolist(),
            "amp1": self.amp1.tolist(),
            "kl_residual": self.kl_residual,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CodeWords":
        return cls(
            support0=tuple(data["support0"]),
            support1=tuple(data["support1"]),
            amp0=np.asarray(data["amp0"], dtype=float),
            amp1=np.asarray(data["amp1"], dtype=float),
            kl_residual=float(data["kl_residual"]),
        )


def _pair_products(kraus: KrausSet, n_errors: int) -> np.ndarray:
    """M[k, j, i] = (E_k^dag E_j)_ii for k <= j < n_errors."""
    diag = kraus.diagonals[:n_errors]
    return diag.conj()[:, None, :] * diag[None, :, :]


def _residual_rows(m_tensor: np.ndarray) -> np.ndarray:
    """Stack Re/Im of the upper-triangle (k <= j) pair products into rows."""
    n = m_tensor.shape[0]
    rows = []
    for k in range(n):
        for j in range(k, n):
            rows.append(np.real(m_tensor[k, j]))
            if np.abs(np.imag(m_tensor[k, j])).max() > 1e-15:
                rows.append(np.imag(m_tensor[k, j]))
    return np.array(rows)


def kl_residual(cw: CodeWords, kraus: KrausSet, n_errors: int) -> float:
    """Max Knill-Laflamme violation over pairs (k, j) with k, j < n_errors.

    Checks both |<0|E_k^dag E_j|0> - <1|E_k^dag E_j|1>| and
    |<0|E_k^dag E_j|1>|; the latter vanishes identically for disjoint
    supports and diagonal operators.
    """
    dim = kraus.dim
    w0 = cw.vector(0, dim)
    w1 = cw.vector(1, dim)
    worst = 0.0
    for k in range(n_errors):
        ek = kraus.diagonals[k]
        for j in range(n_errors):
            ej = kraus.diagonals[j]
            prod = ek.conj() * ej
            same = np.vdot(w0, prod * w0) - np.vdot(w1, prod * w1)
            cross = np.vdot(w0, prod * w1)
            worst = max(worst, abs(same), abs(cross))
    return float(worst)


def iter_partitions(d: int):
    """Disjoint half-supports of {0..d-1}, index 0 pinned to S0, lexicographic."""
    rest = range(1, d)
    for extra in combinations(rest, d // 2 - 1):
        s0 = (0,) + extra
        s1 = tuple(sorted(set(range(d)) - set(s0)))
        yield s0, s1


def _solve_partition(rows: np.ndarray, s0, s1) -> tuple[np.ndarray, np.ndarray] | None:
    """NNLS for squared amplitudes on one partition; None when degenerate."""
    d = rows.shape[1]
    signs = np.ones(d)
    signs[list(s1)] = -1.0
    a = rows * signs[None, :]
    norm0 = np.zeros(d)
    norm0[list(s0)] = _NORM_WEIGHT
    norm1 = np.zeros(d)
    norm1[list(s1)] = _NORM_WEIGHT
    a_full = np.vstack([a, norm0[None, :], norm1[None, :]])
    b = np.zeros(a_full.shape[0])
    b[-2:] = _NORM_WEIGHT
    try:
        p, _ = nnls(a_full, b, maxiter=50 * d)
    except RuntimeError:
        # Near-degenerate columns can stall the active-set iteration; such
        # partitions lose the residual comparison anyway.
        return None
    p0 = p[list(s0)]
    p1 = p[list(s1)]
    if p0.sum() <= 1e-12 or p1.sum() <= 1e-12:
        return None
    return p0 / p0.sum(), p1 / p1.sum()


def solve_codewords(
    kraus: KrausSet,
    n_errors: int,
    d: int | None = None,
    residual_threshold: float | None = DEFAULT_RESIDUAL_THRESHOLD,
) -> CodeWords:
    """Find the disjoint-support code words correcting the leading errors.

    Every balanced partition of the d eigenbasis indices is tried; each yields
    a nonnegative least-squares problem for the squared amplitudes.  Returns
    the partition with the smallest exact KL residual (ties: first in
    lexicographic order).  Raises :class:`CodeSolveError` when the best
    residual exceeds ``residual_threshold`` (pass None to always return).
    """
    if d is None:
        d = kraus.dim
    if d != kraus.dim:
        raise ValueError("d must match the Kraus operator dimension")
    if d % 2 != 0:
        raise ValueError("d must be even")
    if not 1 <= n_errors <= d // 2:
        raise ValueError(f"number of corrected errors must be in [1, {d // 2}]")
    if n_errors > kraus.n_ops:
        raise ValueError("channel has fewer Kraus operators than requested")

    rows = _residual_rows(_pair_products(kraus, n_errors))
    best: CodeWords | None = None
    for s0, s1 in iter_partitions(d):
        solved = _solve_partition(rows, s0, s1)
        if solved is None:
            continue
        p0, p1 = solved
        candidate = CodeWords(
            support0=s0,
            support1=s1,
            amp0=np.sqrt(p0),
            amp1=np.sqrt(p1),
            kl_residual=0.0,
        )
        residual = kl_residual(candidate, kraus, n_errors)
        candidate = CodeWords(
            support0=s0,
            support1=s1,
            amp0=candidate.amp0,
            amp1=candidate.amp1,
            kl_residual=residual,
        )
        if best is None or residual < best.kl_residual:
            best = candidate
    if best is None:
        raise CodeSolveError(np.inf, residual_threshold or np.inf)
    if residual_threshold is not None and best.kl_residual > residual_threshold:
        raise CodeSolveError(best.kl_residual, residual_threshold)
    return best


@dataclass(frozen=True)
class ErrorBasis:
    """Orthonormal error words |ell, k> as columns, k-minor within each ell.

    Column ``ell * n_errors + k`` is the Gram-Schmidt image of
    E_k |ell_L> in the qudit eigenbasis.
    """

    vectors: np.ndarray
    n_errors: int

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def word(self, ell: int, k: int) -> np.ndarray:
        return self.vectors[:, ell * self.n_errors + k]

    def span_projector(self) -> np.ndarray:
        return self.vectors @ self.vectors.conj().T

    def to_dict(self) -> dict:
        return {
            "vectors_re": np.real(self.vectors).tolist(),
            "vectors_im": np.imag(self.vectors).tolist(),
            "n_errors": self.n_errors,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ErrorBasis":
        vecs = np.asarray(data["vectors_re"]) + 1j * np.asarray(data["vectors_im"])
        return cls(vectors=vecs, n_errors=int(data["n_errors"]))


def build_error_basis(cw: CodeWords, kraus: KrausSet, n_errors: int | None = None) -> ErrorBasis:
    """Gram-Schmidt the images {E_k |ell_L>} over k ascending, per ell block.

    The two ell blocks live on disjoint supports, so cross-block overlaps are
    zero by construction.  A post-projection norm below 1e-10 means the error
    space collapsed (E_k image linearly dependent) and raises.
    """
    if n_errors is None:
        n_errors = kraus.n_ops
    dim = kraus.dim
    columns = []
    for ell in (0, 1):
        word = cw.vector(ell, dim)
        block: list[np.ndarray] = []
        for k in range(n_errors):
            v = kraus.diagonals[k] * word
            for prev in block:
                v = v - prev * np.vdot(prev, v)
            norm = np.linalg.norm(v)
            if norm < 1e-10:
                raise ErrorBasisCollapseError(
                    f"error word (ell={ell}, k={k}) collapsed; "
                    f"channel supports fewer than {n_errors} correctable errors"
                )
            block.append(v / norm)
        columns.extend(block)
    vectors = np.column_stack(columns)
    gram = vectors.conj().T @ vectors
    if np.abs(gram - np.eye(2 * n_errors)).max() > 1e-10:
        raise ErrorBasisCollapseError("error basis failed orthonormality check")
    return ErrorBasis(vectors=vectors, n_errors=n_errors)


def stabilizer_observable(basis: ErrorBasis, lambdas) -> np.ndarray:
    """S = sum_k lambda_k (|0,k><0,k| + |1,k><1,k|); one eigenvalue per syndrome."""
    lambdas = np.asarray(lambdas, dtype=float)
    if len(lambdas) != basis.n_errors:
        raise ValueError("need one eigenvalue per corrected error")
    if len(np.unique(lambdas)) != len(lambdas):
        raise ValueError("stabilizer eigenvalues must be pairwise distinct")
    dim = basis.dim
    s = np.zeros((dim, dim), dtype=complex)
    for k, lam in enumerate(lambdas):
        for ell in (0, 1):
            w = basis.word(ell, k)
            s += lam * np.outer(w, w.conj())
    return s
