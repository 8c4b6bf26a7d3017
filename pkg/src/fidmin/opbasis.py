"""Orthonormal Hermitian operator bases and the real coefficient matrix of a state.

A state on C^m (x) C^n is expanded as ``rho = sum_ij gamma_ij X_i (x) Y_j`` with
``X_0 = I/sqrt(m)``, ``Y_0 = I/sqrt(n)``. The block structure of ``gamma`` is::

    gamma = [[1/sqrt(mn), y^T],
             [x,          T  ]]
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, ValidationError
from .states import DensityMatrix

IMAG_DROP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    dim: int
    elements: np.ndarray  # shape (dim**2, dim, dim)

    def coefficients(self, a):
        """Real expansion coefficients Tr(X_i a) of a Hermitian operator."""
        return np.einsum("kij,ji->k", self.elements, a).real

    def combine(self, coeffs):
        return np.einsum("k,kij->ij", coeffs, self.elements)


@dataclass(frozen=True, eq=False)
class BlochDecomposition:
    dim_a: int
    dim_b: int
    gamma: np.ndarray
    x: np.ndarray
    y: np.ndarray
    t: np.ndarray
    gamma_norm_sq: float

    @property
    def s_matrix(self):
        """``x x^T + T T^T`` (square in the subsystem-A traceless sector)."""
        return np.outer(self.x, self.x) + self.t @ self.t.T


@lru_cache(maxsize=None)
def _gell_mann(d):
    if d < 2:
        raise DimensionError(f"operator basis needs d >= 2, got {d}")
    mats = [np.eye(d, dtype=np.complex128) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=np.complex128)
            s[j, k] = s[k, j] = 1
            a = np.zeros((d, d), dtype=np.complex128)
            a[j, k], a[k, j] = -1j, 1j
            mats += [s / np.sqrt(2), a / np.sqrt(2)]
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        mats.append(np.diag(diag * np.sqrt(2 / (l * (l + 1)))).astype(np.complex128) / np.sqrt(2))
    elems = np.array(mats)
    elems.setflags(write=False)
    return elems


def gell_mann_basis(d):
    """Normalized generalized Gell-Mann basis, identity first.

    For ``d = 2`` the elements are ``I, sigma_x, sigma_y, sigma_z`` divided by
    ``sqrt(2)`` (ordering x, y, z).
    """
    return OperatorBasis(d, _gell_mann(d))


def remix_basis(basis, orthogonal):
    """Rotate the traceless sector of a basis by a real orthogonal matrix."""
    orthogonal = np.asarray(orthogonal, dtype=float)
    k = basis.dim**2 - 1
    if orthogonal.shape != (k, k):
        raise DimensionError(f"need a {k}x{k} orthogonal matrix")
    rest = np.einsum("ab,bij->aij", orthogonal, basis.elements[1:])
    return OperatorBasis(basis.dim, np.concatenate([basis.elements[:1], rest]))


def decompose(rho, basis_a=None, basis_b=None):
    m, n = rho.dim_a, rho.dim_b
    basis_a = basis_a or gell_mann_basis(m)
    basis_b = basis_b or gell_mann_basis(n)
    r = rho.mat.reshape(m, n, m, n)
    # gamma_ij = sum rho[a b, a' b'] X_i[a', a] Y_j[b', b]
    g = np.einsum("abcd,ica,jdb->ij", r, basis_a.elements, basis_b.elements)
    imag = float(np.max(np.abs(g.imag)))
    if imag > IMAG_DROP_TOL:
        raise ValidationError("hermiticity", f"imaginary coefficient residue {imag:.3e}")
    g = g.real
    g.setflags(write=False)
    return BlochDecomposition(
        dim_a=m,
        dim_b=n,
        gamma=g,
        x=g[1:, 0],
        y=g[0, 1:],
        t=g[1:, 1:],
        gamma_norm_sq=float(np.sum(g**2)),
    )


def reconstruct(bd, basis_a=None, basis_b=None):
    basis_a = basis_a or gell_mann_basis(bd.dim_a)
    basis_b = basis_b or gell_mann_basis(bd.dim_b)
    if basis_a.dim != bd.dim_a or basis_b.dim != bd.dim_b:
        raise DimensionError("operator bases do not match the decomposition")
    m, n = bd.dim_a, bd.dim_b
    r = np.einsum("ij,iac,jbd->abcd", bd.gamma, basis_a.elements, basis_b.elements)
    return DensityMatrix(m, n, r.reshape(m * n, m * n))


def from_blocks(m, n, x, y, t):
    """Assemble a decomposition from its local vectors and correlation matrix."""
    g = np.zeros((m * m, n * n))
    g[0, 0] = 1 / np.sqrt(m * n)
    g[1:, 0] = x
    g[0, 1:] = y
    g[1:, 1:] = t
    return BlochDecomposition(m, n, g, g[1:, 0], g[0, 1:], g[1:, 1:], float(np.sum(g**2)))


def measurement_coefficients(meas, basis):
    """Matrix with rows ``Tr(|k><k| X_i)`` for the basis vectors ``|k>`` of ``meas``."""
    if meas.dim != basis.dim:
        raise DimensionError(f"measurement dim {meas.dim} vs basis dim {basis.dim}")
    u = meas.basis
    # Tr(|k><k| X) = <k|X|k>
    return np.einsum("ak,iab,bk->ki", u.conj(), basis.elements, u).real


def fidelity_two_sided_gamma(bd, meas_a, meas_b, basis_a=None, basis_b=None):
    """Pre/post fidelity of a two-sided measurement, from ``gamma`` alone."""
    a = measurement_coefficients(meas_a, basis_a or gell_mann_basis(bd.dim_a))
    b = measurement_coefficients(meas_b, basis_b or gell_mann_basis(bd.dim_b))
    agb = a @ bd.gamma @ b.T
    return float(np.trace(agb @ agb.T)) / bd.gamma_norm_sq


def fidelity_one_sided_gamma(bd, meas_a, basis_a=None):
    a = measurement_coefficients(meas_a, basis_a or gell_mann_basis(bd.dim_a))
    ag = a @ bd.gamma
    return float(np.sum(ag**2)) / bd.gamma_norm_sq
