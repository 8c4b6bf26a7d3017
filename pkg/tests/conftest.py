import numpy as np
import pytest

from fidmin.searchopt import OptimizerConfig
from fidmin.states import BellDiagonalParams, bell_diagonal, pure_from_amplitudes

BELL_VERTICES = [(1, 1, -1), (-1, -1, -1), (1, -1, 1), (-1, 1, 1)]


@pytest.fixture
def bell_state():
    return pure_from_amplitudes(np.eye(2) / np.sqrt(2))


@pytest.fixture
def fast_cfg():
    return OptimizerConfig(starts=4, seed=11)


def bd(c1, c2, c3):
    return bell_diagonal(BellDiagonalParams(c1, c2, c3))


def brute_partial_trace(rho, m, n, keep):
    """Loop-based partial trace, independent of the einsum version."""
    out = np.zeros((m, m) if keep == "A" else (n, n), dtype=complex)
    for i in range(m):
        for j in range(n):
            for k in range(m):
                for l in range(n):
                    if keep == "A" and j == l:
                        out[i, k] += rho[i * n + j, k * n + l]
                    if keep == "B" and i == k:
                        out[j, l] += rho[i * n + j, k * n + l]
    return out


def brute_two_sided(rho, u, v):
    """Sum_{k,k'} (P_k x Q_k') rho (P_k x Q_k') with explicit projectors."""
    out = np.zeros_like(rho)
    for k in range(u.shape[1]):
        p = np.outer(u[:, k], u[:, k].conj())
        for kk in range(v.shape[1]):
            q = np.outer(v[:, kk], v[:, kk].conj())
            w = np.kron(p, q)
            out += w @ rho @ w
    return out


def brute_one_sided(rho, u, n):
    out = np.zeros_like(rho)
    for k in range(u.shape[1]):
        w = np.kron(np.outer(u[:, k], u[:, k].conj()), np.eye(n))
        out += w @ rho @ w
    return out


def brute_fidelity(rho, sigma):
    return np.trace(rho @ sigma).real ** 2 / (np.trace(rho @ rho).real * np.trace(sigma @ sigma).real)
