"""Dense complex linear-algebra primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every function
here is pure and never mutates its arguments.
"""

from typing import NamedTuple

import numpy as np

from .errors import DimensionError, ValidationError

HERMITIAN_TOL = 1e-10


class HermitianEigenSystem(NamedTuple):
    """Eigenvalues in nondecreasing order and matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def kron(a, b):
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(rho, m, n, keep="A"):
    """Reduced state of an ``m*n``-dimensional bipartite operator.

    Parameters
    ----------
    rho : array_like
        Operator on C^m (x) C^n.
    m, n : int
        Subsystem dimensions.
    keep : {"A", "B"}
        Subsystem that is *kept*; the other one is traced out.
    """
    rho = as_matrix(rho)
    if rho.shape != (m * n, m * n):
        raise DimensionError(f"rho has shape {rho.shape}, expected {(m * n, m * n)}")
    r = rho.reshape(m, n, m, n)
    if keep == "A":
        return np.einsum("ijkj->ik", r)
    if keep == "B":
        return np.einsum("ijil->jl", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def hermiticity_defect(h):
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {h.shape}")
    return float(np.max(np.abs(h - h.conj().T))) / 2.0


def symmetrize(h, tol=HERMITIAN_TOL):
    """Return ``(h + h^dagger)/2``; raise if ``h`` is further than ``tol`` from Hermitian."""
    h = as_matrix(h)
    defect = hermiticity_defect(h)
    if defect > tol:
        raise ValidationError("hermiticity", f"max |(H - H^dagger)/2| = {defect:.3e} exceeds {tol:g}")
    return (h + h.conj().T) / 2.0


def hermitian_eig(h):
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending."""
    w, v = np.linalg.eigh(symmetrize(h))
    return HermitianEigenSystem(w, v)


def svd_values(a):
    """Singular values in nonincreasing order."""
    return np.linalg.svd(as_matrix(a), compute_uv=False)


def frobenius_inner(a, b):
    """Hilbert-Schmidt inner product Tr(a^dagger b)."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def expm_hermitian_generator(h):
    """Unitary ``exp(iH)`` for Hermitian ``H``, computed through its eigenbasis."""
    w, v = hermitian_eig(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def is_unitary(u, tol=1e-10):
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)
