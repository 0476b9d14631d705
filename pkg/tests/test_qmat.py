import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcompound.errors import DimensionError
from qcompound.qmat import (
    density,
    haar_unitary,
    kron,
    maximally_mixed,
    norms,
    partial_trace,
    psd_power,
    purify,
    random_density,
    trace_norm,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
PHI = np.array([1, 0, 0, 1]) / np.sqrt(2)


def test_kron_examples():
    assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(kron(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))
    xx = kron(X, X)
    assert np.allclose(xx @ xx, np.eye(4))


def test_partial_trace_examples():
    rho, sigma = random_density(2, 1), random_density(3, 2)
    assert np.allclose(partial_trace(np.kron(rho, sigma), (2, 3), 0), rho)
    assert np.allclose(partial_trace(np.outer(PHI, PHI), (2, 2), 0), np.eye(2) / 2)
    assert np.allclose(partial_trace(np.eye(4) / 4, (2, 2), 1), np.eye(2) / 2)


def test_partial_trace_rejects_bad_dims():
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4), (2, 3), 0)


def test_purify_examples():
    p = purify(np.diag([1.0, 0.0]))
    assert np.allclose(np.abs(p.vec), [1, 0, 0, 0])
    p = purify(np.eye(2) / 2)
    assert np.allclose(partial_trace(p.operator(), (2, 2), 1), np.eye(2) / 2)
    p = purify(np.diag([0.9, 0.1]))
    assert np.allclose(p.vec, [np.sqrt(0.9), 0, 0, np.sqrt(0.1)])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_purify_reduces_to_input(d, seed):
    rho = random_density(d, seed)
    p = purify(rho)
    assert np.isclose(np.linalg.norm(p.vec), 1)
    assert np.allclose(partial_trace(p.operator(), (d, d), 1), rho, atol=1e-10)


def test_haar_unitary_examples():
    u = haar_unitary(1, 3)
    assert np.isclose(abs(u[0, 0]), 1)
    u = haar_unitary(8, 4)
    assert np.allclose(u.conj().T @ u, np.eye(8), atol=1e-10)
    rng = np.random.default_rng(5)
    vals = [abs(haar_unitary(4, rng)[0, 0]) ** 2 for _ in range(10_000)]
    assert abs(np.mean(vals) - 0.25) < 0.01


def test_haar_unitary_is_seeded():
    assert np.array_equal(haar_unitary(5, 9), haar_unitary(5, 9))


def test_norms_examples():
    assert np.allclose(norms(np.eye(4)), (4, 2, 1))
    assert np.allclose(norms(np.diag([1, -1])), (2, np.sqrt(2), 1))
    assert np.isclose(trace_norm(np.outer(PHI, PHI) - np.eye(4) / 4), 1.5)


def test_density_clamps_and_validates():
    rho = density(np.diag([1 + 1e-12, -1e-12]))
    assert np.all(np.linalg.eigvalsh(rho) >= 0)
    with pytest.raises(ValueError):
        density(np.diag([0.5, 0.6]))
    with pytest.raises(ValueError):
        density(np.array([[0.5, 1], [0, 0.5]]))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_random_density_is_state(d, seed):
    rho = random_density(d, seed)
    assert np.isclose(np.trace(rho).real, 1)
    assert np.linalg.eigvalsh(rho).min() > -1e-12
    assert np.allclose(rho, rho.conj().T)


def test_psd_power_inverse_on_support():
    m = np.diag([4.0, 1.0, 0.0])
    assert np.allclose(psd_power(m, -0.5), np.diag([0.5, 1.0, 0.0]))
    assert np.allclose(psd_power(maximally_mixed(3), 1.0), maximally_mixed(3))
