import math
from itertools import product

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import binary_entropy, binomial_mass

from qcompound.channels import apply, identity, phase_flip, random_channel, tensor_power
from qcompound.qmat import maximally_mixed, random_density
from qcompound.typicality import (
    compositions,
    is_typical,
    multinomial,
    phi,
    typical_kraus,
    typical_projector,
    typical_set,
)


def _brute_typical(base, l, delta):
    """All sequences whose empirical distribution is within delta in l1 and supported on base."""
    base = np.asarray(base, dtype=float)
    out = []
    for seq in product(range(len(base)), repeat=l):
        counts = np.bincount(seq, minlength=len(base))
        freq = counts / l
        if np.any((base == 0) & (counts > 0)):
            continue
        if np.abs(freq - base).sum() < delta:
            out.append(seq)
    return out


def test_typical_set_examples():
    for l in (1, 4, 7):
        ts = typical_set([1.0, 0.0], l, 0.2)
        assert ts.size == 1 and list(ts.sequences()) == [(0,) * l]
    assert typical_set([0.5, 0.5], 10, 0.2).size == math.comb(10, 5) == 252
    assert typical_set([0.5, 0.5], 10, 0.45).size == 120 + 210 + 252 + 210 + 120 == 912


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.floats(0.05, 0.9), st.lists(st.integers(0, 5), min_size=2, max_size=3))
def test_typical_set_matches_brute_force(l, delta, weights):
    if sum(weights) == 0:
        weights = [1] + weights[1:]
    base = np.array(weights, dtype=float) / sum(weights)
    ts = typical_set(base, l, delta)
    brute = _brute_typical(base, l, delta)
    assert ts.size == len(brute)
    assert sorted(ts.sequences()) == sorted(brute)
    assert all(is_typical(np.bincount(s, minlength=len(base)), base, delta) for s in brute)


def test_compositions_and_multinomial():
    comps = list(compositions(4, 3))
    assert len(comps) == math.comb(6, 2)
    assert sum(multinomial(c) for c in comps) == 3**4


def test_pure_state_projector():
    spec, cert = typical_projector(np.diag([1.0, 0.0]), 6, 0.3)
    assert spec.rank == 1 and np.isclose(cert.mass, 1)
    assert np.isclose(np.trace(spec.projector()).real, 1)


def test_uniform_qubit_projector():
    spec, cert = typical_projector(maximally_mixed(2), 10, 0.2)
    assert spec.rank == 252
    assert np.isclose(cert.mass, 252 / 1024)
    q = spec.projector()
    sandwich = q @ np.kron(np.eye(2**5) / 2**5, np.eye(2**5) / 2**5) @ q
    assert np.allclose(sandwich, q / 2**10)
    assert cert.sandwich_lo == cert.sandwich_hi == 1.0


def test_biased_qubit_projector():
    spec, cert = typical_projector(np.diag([0.9, 0.1]), 12, 0.3)
    assert cert.mass >= 0.8
    assert np.isclose(cert.mass, binomial_mass(12, 0.1, [0, 1, 2]))
    assert cert.hs2 <= 2 ** (-12 * (binary_entropy(0.1) - 3 * phi(0.3, 2)))
    assert cert.item1 and cert.item2 and cert.item3_upper


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3), st.integers(1, 6), st.floats(0.1, 0.49), st.integers(0, 2**32 - 1))
def test_projector_invariants(d, l, delta, seed):
    rho = random_density(d, seed)
    spec, cert = typical_projector(rho, l, delta)
    q = spec.projector()
    assert np.allclose(q @ q, q, atol=1e-10)
    assert np.allclose(q, q.conj().T, atol=1e-10)
    big = rho
    for _ in range(l - 1):
        big = np.kron(big, rho)
    assert np.isclose(np.trace(q @ big).real, cert.mass, atol=1e-10)
    # q commutes with the tensor power
    assert np.allclose(q @ big, big @ q, atol=1e-10)
    assert cert.item3_upper
    # retained eigenvalues lie in the recorded exponent window
    if spec.rank:
        kept = spec.eigenvalues()[spec.mask]
        assert np.isclose(-np.log2(kept.max()) / l, cert.sandwich_lo)
        assert np.isclose(-np.log2(kept.min()) / l, cert.sandwich_hi)


def test_sandwich_window_fails_for_small_eigenvalues():
    # a frequency shift of delta moves the exponent by about delta log(1/eps)
    _, cert = typical_projector(np.diag([0.99, 0.01]), 6, 0.4)
    assert not cert.item2
    assert cert.sandwich_hi > cert.entropy + cert.phi


def test_identity_channel_kraus_set():
    red, cert = typical_kraus(identity(2), maximally_mixed(2), 5, 0.3)
    assert cert.n_words == 1 and list(red.words()) == [(0,) * 5]
    rho = random_density(32, 0)
    assert np.allclose(red.apply(rho), rho)


def test_phase_flip_kraus_set():
    red, cert = typical_kraus(phase_flip(0.1), maximally_mixed(2), 10, 0.3)
    assert cert.n_words == 1 + 10 + 45 == 56
    assert abs(cert.mass - binomial_mass(10, 0.1, [0, 1, 2])) < 1e-10
    assert abs(cert.mass - 0.9298) < 1e-4
    assert math.log2(cert.n_words) <= 10 * (cert.entropy_exchange + cert.gamma)
    assert cert.item2


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 4), st.floats(0.1, 0.7), st.integers(0, 2**32 - 1))
def test_reduced_operation_matches_dense(l, delta, seed):
    ch = random_channel(2, 2, 3, seed)
    red, cert = typical_kraus(ch, maximally_mixed(2), l, delta)
    rho = random_density(2**l, seed)
    dense = red.as_channel() if cert.n_words else None
    out = red.apply(rho)
    if dense is None:
        assert np.allclose(out, 0)
    else:
        assert np.allclose(out, apply(dense, rho), atol=1e-12)
    full = apply(tensor_power(ch, l), rho)
    # reduced operation is dominated by the full channel
    assert np.linalg.eigvalsh(full - out).min() > -1e-10
    # at pi_G the retained trace equals the retained word mass
    pi = maximally_mixed(2**l)
    assert np.isclose(np.trace(red.apply(pi)).real, cert.mass, atol=1e-10)
