import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fidmin.errors import DimensionError, ValidationError
from fidmin.matkernel import (
    expm_hermitian_generator,
    frobenius_inner,
    hermitian_eig,
    kron,
    partial_trace,
    svd_values,
)
from fidmin.states import PAULI_X, PAULI_Y, PAULI_Z, random_density

from conftest import brute_partial_trace


def test_kron_examples():
    assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(kron(np.diag([1, 0]), np.diag([1, 0])), np.diag([1, 0, 0, 0]))
    assert np.allclose(kron(PAULI_Z, PAULI_Z), np.diag([1, -1, -1, 1]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_kron_associative_and_trace_multiplicative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)) for k in (2, 3, 2))
    assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)))
    assert np.isclose(np.trace(kron(a, b)), np.trace(a) * np.trace(b))


def test_partial_trace_product_and_bell():
    a = random_density(2, 1, 1).mat
    b = random_density(3, 1, 2).mat
    rho = kron(a, b)
    assert np.max(np.abs(partial_trace(rho, 2, 3, "A") - a)) < 1e-12
    assert np.max(np.abs(partial_trace(rho, 2, 3, "B") - b)) < 1e-12
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(partial_trace(np.outer(phi, phi), 2, 2, "A"), np.eye(2) / 2)


def test_partial_trace_matches_loops_and_preserves_trace():
    rho = random_density(2, 3, 5).mat
    for keep in "AB":
        out = partial_trace(rho, 2, 3, keep)
        assert np.allclose(out, brute_partial_trace(rho, 2, 3, keep))
        assert np.isclose(np.trace(out), np.trace(rho))


def test_partial_trace_rejects_bad_dims():
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4), 2, 3)


def test_hermitian_eig_examples():
    assert np.allclose(hermitian_eig(np.diag([3.0, 1.0, 2.0])).eigenvalues, [1, 2, 3])
    assert np.allclose(hermitian_eig(PAULI_X).eigenvalues, [-1, 1])
    assert np.allclose(hermitian_eig(np.eye(4)).eigenvalues, 1)


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(ValidationError) as exc:
        hermitian_eig(np.array([[0, 1], [0, 0]]))
    assert exc.value.invariant == "hermiticity"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8))
def test_hermitian_eig_reconstruction(seed, d):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = g + g.conj().T
    w, v = hermitian_eig(h)
    assert np.all(np.diff(w) >= 0)
    assert np.max(np.abs((v * w) @ v.conj().T - h)) <= 1e-10
    assert np.allclose(v.conj().T @ v, np.eye(d))


def test_svd_values():
    assert np.allclose(svd_values(np.eye(2)), [1, 1])
    assert np.allclose(svd_values(np.eye(2) / np.sqrt(2)), [1 / np.sqrt(2)] * 2)
    s = svd_values(np.outer([1, 2, 3], [1, -1j]))
    assert np.sum(s > 1e-12) == 1
    assert np.all(np.diff(s) <= 0)


def test_frobenius_inner():
    assert np.isclose(frobenius_inner(PAULI_X / np.sqrt(2), PAULI_X / np.sqrt(2)), 1)
    assert np.isclose(frobenius_inner(PAULI_X, PAULI_Y), 0)
    p = 0.3
    rho = np.diag([p, 1 - p])
    assert np.isclose(frobenius_inner(rho, rho), p**2 + (1 - p) ** 2)
    with pytest.raises(DimensionError):
        frobenius_inner(np.eye(2), np.eye(3))


def test_expm_hermitian_generator():
    assert np.allclose(expm_hermitian_generator(np.zeros((2, 2))), np.eye(2))
    u = expm_hermitian_generator(np.pi * PAULI_Y / 2)
    # exp(i pi/2 sigma_y) = i sigma_y, which maps |0> to -|1>
    assert np.allclose(u, 1j * PAULI_Y)
    assert np.allclose(np.abs(u @ [1, 0]), [0, 1])
    rng = np.random.default_rng(3)
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    u = expm_hermitian_generator(g + g.conj().T)
    assert np.max(np.abs(u.conj().T @ u - np.eye(3))) <= 1e-10
    with pytest.raises(ValidationError):
        expm_hermitian_generator(np.array([[0, 1], [0, 0]]))
