"""Local von Neumann measurements and the set of marginal-preserving ones.

A rank-1 projective measurement on a ``d``-level system is stored as a
unitary whose columns are the measurement vectors ``|k>``. Applying it
non-selectively dephases the state in that basis.

Only measurements that leave the measured marginal unchanged are admissible.
Those are exactly the bases ``W @ blockdiag(U_1, ..., U_r)`` where ``W``
diagonalizes the marginal and each ``U_b`` acts inside one degenerate
eigenspace. :func:`admissible_parameterization` finds the eigenspaces and
:func:`realize_admissible` maps real coordinates (Hermitian-generator
components, one ``d_b x d_b`` generator per degenerate block) onto that set.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, ValidationError
from .matkernel import as_matrix, hermitian_eig
from .states import DensityMatrix

DEGENERACY_TOL = 1e-8
EXACT_GAP_TOL = 1e-12  # gaps below this are eigensolver noise


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    basis: np.ndarray

    def __post_init__(self):
        u = as_matrix(self.basis)
        if u.shape[0] != u.shape[1]:
            raise DimensionError(f"measurement basis must be square, got {u.shape}")
        if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > 1e-10:
            raise ValidationError("orthonormality", "measurement vectors are not orthonormal")
        u = u.copy()
        u.setflags(write=False)
        object.__setattr__(self, "basis", u)

    @property
    def dim(self):
        return self.basis.shape[0]

    def projectors(self):
        u = self.basis
        return np.einsum("ak,bk->kab", u, u.conj())

    @classmethod
    def computational(cls, d):
        return cls(np.eye(d, dtype=np.complex128))

    @classmethod
    def _trusted(cls, basis):
        # skips validation; for bases unitary by construction
        obj = object.__new__(cls)
        object.__setattr__(obj, "basis", basis)
        return obj


def _check_side(rho, meas, side):
    d = rho.dim_a if side == "A" else rho.dim_b
    if side not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    if meas.dim != d:
        raise DimensionError(f"measurement dim {meas.dim} does not match side {side} dim {d}")


def dephase_one_sided(mat, m, n, u, side):
    """Raw-array kernel behind :func:`apply_one_sided`."""
    if side == "A":
        w = np.kron(u, np.eye(n))
        r = (w.conj().T @ mat @ w).reshape(m, n, m, n)
        mask = np.eye(m, dtype=bool)[:, None, :, None]
    else:
        w = np.kron(np.eye(m), u)
        r = (w.conj().T @ mat @ w).reshape(m, n, m, n)
        mask = np.eye(n, dtype=bool)[None, :, None, :]
    r = np.where(mask, r, 0.0).reshape(m * n, m * n)
    return w @ r @ w.conj().T


def dephase_two_sided(mat, u, v):
    w = np.kron(u, v)
    p = np.diagonal(w.conj().T @ mat @ w).real
    return (w * p) @ w.conj().T


def apply_one_sided(rho, meas, side="A"):
    """Non-selective measurement on one subsystem, identity on the other."""
    _check_side(rho, meas, side)
    out = dephase_one_sided(rho.mat, rho.dim_a, rho.dim_b, meas.basis, side)
    return DensityMatrix(rho.dim_a, rho.dim_b, out)


def apply_two_sided(rho, meas_a, meas_b):
    _check_side(rho, meas_a, "A")
    _check_side(rho, meas_b, "B")
    return DensityMatrix(rho.dim_a, rho.dim_b, dephase_two_sided(rho.mat, meas_a.basis, meas_b.basis))


def dephase_local(mat, meas):
    """Sum_k P_k mat P_k for a single-system operator."""
    u = meas.basis
    inner = u.conj().T @ as_matrix(mat) @ u
    return (u * np.diagonal(inner)) @ u.conj().T


def marginal_invariant(rho_marginal, meas, tol=1e-8):
    rho_marginal = as_matrix(rho_marginal)
    if rho_marginal.shape != (meas.dim, meas.dim):
        raise DimensionError("marginal and measurement dimensions differ")
    return bool(np.max(np.abs(dephase_local(rho_marginal, meas) - rho_marginal)) <= tol)


@dataclass(frozen=True, eq=False)
class AdmissibleParameterization:
    """Eigenspace structure of a marginal.

    ``blocks`` holds ``(indices, eigenvalue)`` pairs with ``indices`` into the
    columns of ``eigenbasis``. Only blocks of size > 1 carry coordinates, so
    ``free_parameter_count`` is zero for a nondegenerate marginal.
    ``min_gap`` is the smallest eigenvalue gap above eigensolver noise,
    merged or not, so callers can flag near-degenerate marginals.
    """

    eigenbasis: np.ndarray
    blocks: tuple
    free_parameter_count: int
    min_gap: float

    @property
    def dim(self):
        return self.eigenbasis.shape[0]

    @property
    def free_blocks(self):
        return tuple(idx for idx, _ in self.blocks if len(idx) > 1)


def admissible_parameterization(rho_marginal, tol=DEGENERACY_TOL):
    """Group marginal eigenvalues whose consecutive gaps are <= ``tol``."""
    w, v = hermitian_eig(rho_marginal)
    blocks, current = [], [0]
    gaps = np.diff(w)
    for i, gap in enumerate(gaps, start=1):
        if gap <= tol:
            current.append(i)
        else:
            blocks.append(current)
            current = [i]
    blocks.append(current)
    blocks = tuple((tuple(b), float(np.mean(w[b]))) for b in blocks)
    count = sum(len(b) ** 2 for b, _ in blocks if len(b) > 1)
    # smallest gap above numerical noise, merged or not; inf when there is none
    resolved = gaps[gaps > EXACT_GAP_TOL]
    min_gap = float(resolved.min()) if resolved.size else float("inf")
    v.setflags(write=False)
    return AdmissibleParameterization(v, blocks, count, min_gap)


@lru_cache(maxsize=None)
def _triu(d):
    return np.triu_indices(d, 1)


def hermitian_from_coords(coords, d):
    """Map ``d*d`` reals onto a ``d x d`` Hermitian matrix."""
    coords = np.asarray(coords, dtype=float)
    h = np.zeros((d, d), dtype=np.complex128)
    h[np.diag_indices(d)] = coords[:d]
    iu = _triu(d)
    k = len(iu[0])
    off = coords[d : d + k] + 1j * coords[d + k : d + 2 * k]
    h[iu] = off
    h[(iu[1], iu[0])] = off.conj()
    return h


def _unitary_exp(h):
    if h.shape == (2, 2):
        # exp(i(a0 I + a.sigma)) = e^{i a0} (cos|a| I + i sin|a| a.sigma/|a|)
        a0 = (h[0, 0].real + h[1, 1].real) / 2
        az = (h[0, 0].real - h[1, 1].real) / 2
        off = h[0, 1]
        r = np.sqrt(az * az + abs(off) ** 2)
        sinc = np.sin(r) / r if r > 1e-300 else 1.0
        c, ph = np.cos(r), np.exp(1j * a0)
        return ph * np.array([[c + 1j * sinc * az, 1j * sinc * off], [1j * sinc * np.conj(off), c - 1j * sinc * az]])
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def realize_admissible(param, coords, anchor=None):
    """Admissible measurement at generator coordinates ``coords``.

    ``anchor`` optionally supplies one unitary per free block; the block
    unitary is then ``anchor_b @ exp(i H_b)``, i.e. ``coords`` are local
    coordinates around the anchor. With no anchor, zero coordinates give the
    marginal eigenbasis itself.
    """
    coords = np.asarray(coords, dtype=float).reshape(-1)
    if coords.size != param.free_parameter_count:
        raise DimensionError(f"expected {param.free_parameter_count} coordinates, got {coords.size}")
    blocks = param.free_blocks
    if len(blocks) == 1 and len(blocks[0]) == param.dim:
        u = _unitary_exp(hermitian_from_coords(coords, param.dim))
        if anchor is not None:
            u = anchor[0] @ u
        return ProjectiveMeasurement._trusted(param.eigenbasis @ u)
    basis = np.array(param.eigenbasis)
    pos = 0
    for b, idx in enumerate(blocks):
        d = len(idx)
        u = _unitary_exp(hermitian_from_coords(coords[pos : pos + d * d], d))
        if anchor is not None:
            u = anchor[b] @ u
        pos += d * d
        cols = list(idx)
        basis[:, cols] = basis[:, cols] @ u
    return ProjectiveMeasurement._trusted(basis)
