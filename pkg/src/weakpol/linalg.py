"""Dense complex linear algebra for the 2- and 4-dimensional spaces used here.

Vectors and matrices are plain complex numpy arrays; nothing in this module
assumes a physical interpretation. Hermitian operators are handled through
their spectral decomposition, with nearly degenerate eigenvalues merged into
a single projector so that operator functions remain stable when an exact
degeneracy is split by rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

HERMITIAN_TOL = 1e-12
EIGENVALUE_CLUSTER_TOL = 1e-9
NORMALIZATION_TOL = 1e-12


def as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"expected a nonempty 1-d complex vector, got shape {arr.shape}")
    return arr


def as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError(f"expected a square complex matrix, got shape {arr.shape}")
    return arr


def require_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``m`` as a complex array, raising if it is not Hermitian."""
    arr = as_matrix(m)
    defect = float(np.max(np.abs(arr - arr.conj().T)))
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian (max |M - M^H| = {defect:.3e})")
    return arr


def require_normalized(v, tol: float = NORMALIZATION_TOL) -> np.ndarray:
    arr = as_vector(v)
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state vector is not normalized (|norm - 1| = {abs(norm - 1.0):.3e})")
    return arr


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two vectors or two matrices.

    The first operand is the slow index, so for basis vectors the combined
    index is ``i_combined = dim_b * i_a + i_b``. Mixing a vector with a
    matrix is rejected.
    """
    a_arr = np.asarray(a, dtype=complex)
    b_arr = np.asarray(b, dtype=complex)
    if a_arr.ndim != b_arr.ndim:
        raise ValueError(
            f"tensor operands must be the same kind, got ndim {a_arr.ndim} and {b_arr.ndim}"
        )
    if a_arr.ndim not in (1, 2):
        raise ValueError(f"tensor operands must be vectors or matrices, got ndim {a_arr.ndim}")
    return np.kron(a_arr, b_arr)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix with degeneracies merged.

    ``eigenvalues``/``eigenvectors`` hold the raw ascending spectrum (one
    column per eigenvector, phases fixed deterministically). Eigenvalues
    closer than the clustering tolerance share one entry of
    ``distinct_eigenvalues`` and one projector; each projector is the sum of
    the outer products of its cluster's eigenvectors.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    distinct_eigenvalues: np.ndarray
    projectors: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def reconstruct(self) -> np.ndarray:
        """Sum of eigenvalue * projector over the distinct clusters."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for value, projector in zip(self.distinct_eigenvalues, self.projectors):
            out += value * projector
        return out


def _fix_phase(column: np.ndarray) -> np.ndarray:
    # Make the first component of largest magnitude real and positive so the
    # decomposition is byte-stable across runs.
    pivot = int(np.argmax(np.abs(column)))
    phase = column[pivot] / abs(column[pivot])
    return column * phase.conjugate()


def hermitian_eigen(m, cluster_tol: float = EIGENVALUE_CLUSTER_TOL) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix.

    Eigenvalues are ascending; eigenvalues whose gap is below ``cluster_tol``
    are merged into one cluster, represented by the cluster mean and a single
    rank-``k`` projector.
    """
    arr = require_hermitian(m)
    eigenvalues, eigenvectors = np.linalg.eigh(arr)
    eigenvectors = eigenvectors.copy()
    for j in range(eigenvectors.shape[1]):
        eigenvectors[:, j] = _fix_phase(eigenvectors[:, j])

    # Split indices into clusters of nearly equal eigenvalues.
    clusters: list[list[int]] = [[0]]
    for i in range(1, eigenvalues.size):
        if eigenvalues[i] - eigenvalues[i - 1] < cluster_tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])

    distinct = np.array([float(np.mean(eigenvalues[idx])) for idx in clusters])
    projectors = []
    for idx in clusters:
        block = eigenvectors[:, idx]
        projector = block @ block.conj().T
        projectors.append((projector + projector.conj().T) / 2.0)

    return SpectralDecomposition(
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        distinct_eigenvalues=distinct,
        projectors=tuple(projectors),
    )


def operator_function(m, f: Callable[[float], float]) -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix via spectral calculus.

    Returns ``sum_k f(lambda_k) P_k`` over the distinct eigenvalue clusters;
    the result is Hermitian whenever ``f`` is real-valued.
    """
    decomposition = hermitian_eigen(m)
    out = np.zeros((decomposition.dim, decomposition.dim), dtype=complex)
    for value, projector in zip(decomposition.distinct_eigenvalues, decomposition.projectors):
        out += float(f(float(value))) * projector
    return out


def expectation(state, m) -> float:
    """Expectation value of a matrix in a normalized pure state.

    The imaginary part of the quadratic form must vanish to within 1e-12
    (true for Hermitian ``m``); the real part is returned.
    """
    psi = require_normalized(state)
    arr = as_matrix(m)
    if arr.shape[0] != psi.size:
        raise ValueError(f"dimension mismatch: state has {psi.size}, matrix has {arr.shape[0]}")
    value = complex(np.vdot(psi, arr @ psi))
    if abs(value.imag) > 1e-12:
        raise ValueError(f"expectation value has imaginary part {value.imag:.3e}")
    return value.real
