"""Dense complex matrix algebra used throughout the package.

Matrices are plain square ``numpy`` arrays of ``complex128`` in row-major
order.  The Kronecker convention is the standard one,
``kron(a, b)[i*dim(b)+k, j*dim(b)+l] = a[i, j] * b[k, l]``, so basis-state
indices are reproducible: the first factor owns the most significant digit.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NonHermitianInput, NotPositive

HERMITICITY_TOL = 1e-10
IDENTITY_TOL = 1e-10
EIGEN_CLAMP = 1e-10


class EigenDecomposition(NamedTuple):
    """Hermitian eigendecomposition, eigenvalues ascending, eigenvectors in columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(m) -> np.ndarray:
    """Coerce to a square complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def hermiticity_defect(m) -> float:
    """Largest entrywise deviation of ``m`` from its conjugate transpose."""
    a = as_matrix(m)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def is_hermitian(m, tol: float = HERMITICITY_TOL) -> bool:
    return hermiticity_defect(m) <= tol


def kron(a, b) -> np.ndarray:
    """Kronecker product with the row-major convention stated in the module docstring."""
    return np.kron(as_matrix(a), as_matrix(b))


def hermitian_eig(m) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Raises NonHermitianInput if the input deviates from Hermiticity by more
    than ``HERMITICITY_TOL``.
    """
    a = as_matrix(m)
    defect = hermiticity_defect(a)
    if defect > HERMITICITY_TOL:
        raise NonHermitianInput(f"matrix is not Hermitian (defect {defect:.3e})")
    eigenvalues, eigenvectors = np.linalg.eigh(a)
    return EigenDecomposition(eigenvalues, eigenvectors)


def psd_sqrt(m) -> np.ndarray:
    """Positive-semidefinite square root of a PSD Hermitian matrix.

    Eigenvalues below ``EIGEN_CLAMP`` in magnitude are clamped to zero (the
    square root would otherwise amplify eigensolver dust on exact-zero modes);
    anything below ``-EIGEN_CLAMP`` raises NotPositive.
    """
    evals, evecs = hermitian_eig(m)
    lo = float(evals[0]) if evals.size else 0.0
    if lo < -EIGEN_CLAMP:
        raise NotPositive(f"minimum eigenvalue {lo:.3e} below -{EIGEN_CLAMP:.0e}")
    clamped = np.where(evals < EIGEN_CLAMP, 0.0, evals)
    return (evecs * np.sqrt(clamped)) @ evecs.conj().T


def operator_norm(m) -> float:
    """Spectral norm: largest |eigenvalue| for Hermitian input, else largest singular value."""
    a = as_matrix(m)
    if a.size == 0:
        return 0.0
    if is_hermitian(a):
        return float(np.max(np.abs(np.linalg.eigvalsh(a))))
    gram_evals = np.linalg.eigvalsh(a.conj().T @ a)
    return float(np.sqrt(max(float(gram_evals[-1]), 0.0)))
