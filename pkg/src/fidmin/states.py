"""Bipartite density matrices and the state families used throughout.

Werner and isotropic states follow the usual textbook parameterizations:

* ``werner(d, a) = (I - a F) / (d^2 - d a)`` with the swap operator ``F`` and
  ``a`` in [-1, 1]; ``a = 0`` is the maximally mixed state.
* ``isotropic(d, f) = f |Phi+><Phi+| + (1 - f) (I - |Phi+><Phi+|) / (d^2 - 1)``
  with singlet fraction ``f`` in [0, 1]; ``f = 1/d^2`` is maximally mixed.
"""

import hashlib
import logging
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .matkernel import as_matrix, hermiticity_defect, is_unitary, kron, partial_trace

logger = logging.getLogger(__name__)

STATE_TOL = 1e-10
PURE_TOL = 1e-8

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


def validate_density(mat, tol=STATE_TOL):
    """Check Hermiticity, trace and positivity; return a cleaned copy.

    Eigenvalues in ``[-tol, 0)`` are clipped to zero (and the clip logged).
    Raises :class:`ValidationError` naming the first violated invariant.
    """
    mat = as_matrix(mat)
    if mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"density matrix must be square, got {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValidationError("finiteness", "matrix has non-finite entries")
    defect = hermiticity_defect(mat)
    if defect > tol:
        raise ValidationError("hermiticity", f"max |(rho - rho^dagger)/2| = {defect:.3e} exceeds {tol:g}")
    mat = (mat + mat.conj().T) / 2.0
    tr = np.trace(mat).real
    if abs(tr - 1.0) > tol:
        raise ValidationError("trace", f"trace {tr!r} differs from 1 by more than {tol:g}")
    w, v = np.linalg.eigh(mat)
    if w[0] < -tol:
        raise ValidationError("psd", f"smallest eigenvalue {w[0]:.3e} below -{tol:g}")
    if w[0] < 0:
        logger.debug("clipping %d eigenvalue(s) down to %.3e", int(np.sum(w < 0)), w[0])
        w = np.clip(w, 0.0, None)
        mat = (v * w) @ v.conj().T
    return mat


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state on C^dim_a (x) C^dim_b."""

    dim_a: int
    dim_b: int
    mat: np.ndarray

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise DimensionError("subsystem dimensions must be positive")
        mat = as_matrix(self.mat)
        size = self.dim_a * self.dim_b
        if mat.shape != (size, size):
            raise DimensionError(f"matrix shape {mat.shape} does not match {self.dim_a}x{self.dim_b}")
        mat = validate_density(mat)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def dims(self):
        return self.dim_a, self.dim_b

    def marginal(self, keep="A"):
        return partial_trace(self.mat, self.dim_a, self.dim_b, keep)

    def purity(self):
        return float(np.vdot(self.mat, self.mat).real)

    def fingerprint(self):
        data = np.round(self.mat, 12) + 0.0  # +0.0 folds -0.0 into 0.0
        h = hashlib.sha256(f"{self.dim_a}x{self.dim_b}".encode())
        h.update(np.ascontiguousarray(data).tobytes())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class SchmidtForm:
    coefficients: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.coefficients, dtype=float)
        if np.any(s < -STATE_TOL) or abs(s.sum() - 1.0) > STATE_TOL:
            raise ValidationError("normalization", "Schmidt coefficients must be nonnegative and sum to 1")
        object.__setattr__(self, "coefficients", s)


@dataclass(frozen=True)
class BellDiagonalParams:
    """Correlation coefficients ``c_i = <sigma_i (x) sigma_i>``."""

    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        mu = self.eigenvalues()
        if np.any(mu < -STATE_TOL) or np.any(mu > 1 + STATE_TOL):
            raise ValidationError(
                "range", f"c = {self.c} lies outside the physical tetrahedron (eigenvalues {mu})"
            )

    @property
    def c(self):
        return np.array([self.c1, self.c2, self.c3], dtype=float)

    def eigenvalues(self):
        """The four values ``mu_{ij}``, i, j in {1, 2}, in the order 11, 12, 21, 22."""
        c1, c2, c3 = self.c1, self.c2, self.c3
        return np.array(
            [
                (1 + (-1) ** i * c1 - (-1) ** (i + j) * c2 + (-1) ** j * c3) / 4
                for i in (1, 2)
                for j in (1, 2)
            ]
        )

    @staticmethod
    def is_physical(c1, c2, c3):
        try:
            BellDiagonalParams(c1, c2, c3)
        except ValidationError:
            return False
        return True


def pure_from_amplitudes(amps):
    """Projector onto sum_ij amps[i, j] |i>|j>."""
    amps = as_matrix(amps)
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > STATE_TOL:
        raise ValidationError("normalization", f"amplitude norm {norm!r} is not 1")
    psi = amps.reshape(-1)
    m, n = amps.shape
    return DensityMatrix(m, n, np.outer(psi, psi.conj()))


def product_state(rho_a, rho_b):
    rho_a, rho_b = as_matrix(rho_a), as_matrix(rho_b)
    return DensityMatrix(rho_a.shape[0], rho_b.shape[0], kron(rho_a, rho_b))


def classical_quantum(probs, rho_bs, basis_a=None):
    """sum_i p_i |i><i| (x) rho_i with ``|i>`` the columns of ``basis_a``."""
    probs = np.asarray(probs, dtype=float)
    m = len(probs)
    basis_a = np.eye(m) if basis_a is None else as_matrix(basis_a)
    n = as_matrix(rho_bs[0]).shape[0]
    mat = np.zeros((m * n, m * n), dtype=np.complex128)
    for p, k, rb in zip(probs, basis_a.T, rho_bs):
        mat += p * kron(np.outer(k, k.conj()), rb)
    return DensityMatrix(m, n, mat)


def _amplitude_matrix(rho):
    if rho.purity() < 1 - PURE_TOL:
        raise ValidationError("purity", f"state has purity {rho.purity():.6f}; a pure state is required")
    w, v = np.linalg.eigh(rho.mat)
    return v[:, -1].reshape(rho.dim_a, rho.dim_b)


def schmidt_decompose(rho):
    """Schmidt coefficients (as probabilities) and bases of a pure state."""
    u, sv, vh = np.linalg.svd(_amplitude_matrix(rho))
    s = sv**2
    s = s / s.sum()
    return SchmidtForm(s, u[:, : len(s)], vh.T[:, : len(s)])


def schmidt_reconstruct(form):
    amps = form.basis_a @ np.diag(np.sqrt(form.coefficients)) @ form.basis_b.T
    return pure_from_amplitudes(amps)


def bell_diagonal(params):
    c = params.c
    mat = np.eye(4, dtype=np.complex128)
    for ci, s in zip(c, PAULIS):
        mat = mat + ci * np.kron(s, s)
    return DensityMatrix(2, 2, mat / 4)


def swap_operator(d):
    f = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


def max_entangled_vector(d):
    return np.eye(d, dtype=np.complex128).reshape(-1) / np.sqrt(d)


def werner(dim, param):
    if not -1.0 <= param <= 1.0:
        raise ValidationError("range", f"Werner parameter {param} outside [-1, 1]")
    d = dim
    mat = (np.eye(d * d) - param * swap_operator(d)) / (d * d - d * param)
    return DensityMatrix(d, d, mat)


def isotropic(dim, param):
    if not 0.0 <= param <= 1.0:
        raise ValidationError("range", f"isotropic singlet fraction {param} outside [0, 1]")
    d = dim
    phi = max_entangled_vector(d)
    proj = np.outer(phi, phi.conj())
    mat = param * proj + (1 - param) * (np.eye(d * d) - proj) / (d * d - 1)
    return DensityMatrix(d, d, mat)


def max_entangled_mixed(m, n, probs, bases):
    """Mixture of maximally entangled pure states.

    Component ``k`` is ``(1/sqrt(m)) sum_i a_i (x) b_i`` where ``a_i`` are the
    columns of ``bases[k][0]`` (m x m unitary) and ``b_i`` the first ``m``
    columns of ``bases[k][1]`` (n x n unitary or n x m isometry).
    """
    if m > n:
        raise DimensionError("maximally entangled mixtures need m <= n")
    probs = np.asarray(probs, dtype=float)
    if np.any(probs < 0) or abs(probs.sum() - 1) > STATE_TOL:
        raise ValidationError("normalization", "mixture weights must be a probability vector")
    if len(bases) != len(probs):
        raise DimensionError("need one basis pair per mixture weight")
    mat = np.zeros((m * n, m * n), dtype=np.complex128)
    for p, (ba, bb) in zip(probs, bases):
        ba, bb = as_matrix(ba), as_matrix(bb)[:, :m]
        if ba.shape != (m, m) or bb.shape != (n, m):
            raise DimensionError("basis shapes do not match (m, n)")
        if np.max(np.abs(ba.conj().T @ ba - np.eye(m))) > STATE_TOL or np.max(
            np.abs(bb.conj().T @ bb - np.eye(m))
        ) > STATE_TOL:
            raise ValidationError("orthonormality", "supplied bases are not orthonormal")
        psi = (ba @ bb.T).reshape(-1) / np.sqrt(m)
        mat += p * np.outer(psi, psi.conj())
    rho = DensityMatrix(m, n, mat)
    if np.max(np.abs(rho.marginal("A") - np.eye(m) / m)) > STATE_TOL:
        raise ValidationError("marginal", "subsystem A marginal is not maximally mixed")
    return rho


def append_ancilla(rho, ancilla):
    """The state rho (x) ancilla viewed across the cut a : bc."""
    anc = validate_density(ancilla)
    return DensityMatrix(rho.dim_a, rho.dim_b * anc.shape[0], kron(rho.mat, anc))


def _rng(seed):
    return np.random.default_rng(seed)


def ginibre(d, rng, cols=None):
    cols = d if cols is None else cols
    return rng.standard_normal((d, cols)) + 1j * rng.standard_normal((d, cols))


def haar_unitary(d, seed):
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    rng = seed if isinstance(seed, np.random.Generator) else _rng(seed)
    q, r = np.linalg.qr(ginibre(d, rng))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def random_density(m, n, seed):
    rng = seed if isinstance(seed, np.random.Generator) else _rng(seed)
    g = ginibre(m * n, rng)
    w = g @ g.conj().T
    return DensityMatrix(m, n, w / np.trace(w).real)


def random_pure(m, n, seed):
    rng = seed if isinstance(seed, np.random.Generator) else _rng(seed)
    psi = ginibre(m * n, rng, 1).reshape(-1)
    psi /= np.linalg.norm(psi)
    return pure_from_amplitudes(psi.reshape(m, n))


def apply_local_unitary(rho, u, v):
    u, v = as_matrix(u), as_matrix(v)
    if u.shape != (rho.dim_a, rho.dim_a) or v.shape != (rho.dim_b, rho.dim_b):
        raise DimensionError("local unitaries do not match subsystem dimensions")
    if not (is_unitary(u) and is_unitary(v)):
        raise ValidationError("unitarity", "local operators must be unitary")
    w = np.kron(u, v)
    return DensityMatrix(rho.dim_a, rho.dim_b, w @ rho.mat @ w.conj().T)
