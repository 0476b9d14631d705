import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import binary_entropy, diamond_sdp

from qcompound.channels import (
    AveragedChannel,
    KrausChannel,
    amplitude_damping,
    apply,
    apply_local,
    apply_power,
    averaged_apply,
    bit_flip,
    builtin,
    canonical_kraus,
    channel_from_json,
    channel_to_json,
    choi,
    complementary,
    compose,
    depolarizing,
    diamond_distance,
    diamond_estimate,
    identity,
    is_reduction_of,
    mix,
    mix_with_useless,
    pauli_diamond_distance,
    pauli_probabilities,
    phase_flip,
    random_channel,
    tensor,
    tensor_power,
    useless,
    zero_map,
)
from qcompound.errors import GuardError
from qcompound.information import composed_fidelity, entropy
from qcompound.qmat import maximally_mixed, random_density

PLUS = np.array([[1, 1], [1, 1]]) / 2
MINUS = np.array([[1, -1], [-1, 1]]) / 2


def test_apply_examples():
    rho = random_density(2, 0)
    assert np.allclose(apply(identity(2), rho), rho)
    assert np.allclose(apply(useless(2), rho), np.eye(2) / 2)
    assert np.allclose(apply(phase_flip(0.1), PLUS), 0.9 * PLUS + 0.1 * MINUS)


def test_kraus_validation():
    with pytest.raises(ValueError):
        KrausChannel(np.array([np.eye(2), np.eye(2)]))
    KrausChannel(np.array([0.5 * np.eye(2)]), trace_preserving=False)
    with pytest.raises(ValueError):
        KrausChannel(np.array([1.1 * np.eye(2)]), trace_preserving=False)


def test_tensor_power_examples():
    big = tensor_power(identity(2), 3)
    assert big.n_kraus == 1 and np.allclose(big.kraus[0], np.eye(8))
    p = 0.2
    pf2 = tensor_power(phase_flip(p), 2)
    w = sorted(np.real(np.trace(a.conj().T @ a)) / 4 for a in pf2.kraus)
    assert np.allclose(w, sorted([(1 - p) ** 2, p * (1 - p), p * (1 - p), p * p]))
    ch = depolarizing(0.3)
    rho, sigma = random_density(2, 1), random_density(2, 2)
    assert np.allclose(apply(tensor_power(ch, 2), np.kron(rho, sigma)), np.kron(apply(ch, rho), apply(ch, sigma)))


def test_tensor_power_guard():
    with pytest.raises(GuardError):
        tensor_power(depolarizing(0.1), 7)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_site_local_application_matches_dense(l, seed):
    ch = random_channel(2, 2, 3, seed)
    rho = random_density(2**l, seed)
    assert np.allclose(apply_power(ch, rho, l), apply(tensor_power(ch, l), rho), atol=1e-12)


def test_apply_local_on_middle_site():
    ch = random_channel(3, 2, 2, 4)
    rho = random_density(2 * 3 * 2, 5)
    full = tensor(identity(2), ch, identity(2))
    assert np.allclose(apply_local(ch, rho, [2, 3, 2], 1), apply(full, rho))


def test_complementary_examples():
    e = apply(complementary(identity(2)), maximally_mixed(2))
    assert e.shape == (1, 1) and np.isclose(e[0, 0], 1)
    p = 0.1
    e = apply(complementary(phase_flip(p)), maximally_mixed(2))
    assert np.allclose(e, np.diag([1 - p, p]))
    assert np.isclose(entropy(e), binary_entropy(0.1), atol=1e-12)
    assert np.isclose(entropy(e), 0.4690, atol=1e-4)


def test_canonical_kraus_examples():
    c = canonical_kraus(phase_flip(0.1), maximally_mixed(2))
    assert np.allclose(c.weights, [0.9, 0.1])
    a = phase_flip(0.3).kraus
    rotated = KrausChannel(np.array([(a[0] + a[1]) / np.sqrt(2), (a[0] - a[1]) / np.sqrt(2)]))
    c = canonical_kraus(rotated, maximally_mixed(2))
    g = np.einsum("iab,bc,jac->ij", c.channel.kraus, maximally_mixed(2), c.channel.kraus.conj())
    assert np.allclose(g, np.diag(np.diag(g)), atol=1e-12)
    assert np.allclose(c.weights, [0.7, 0.3])
    assert np.allclose(choi(c.channel), choi(rotated), atol=1e-9)


def test_canonical_depolarizing_weights():
    c = canonical_kraus(depolarizing(0.3), maximally_mixed(2))
    assert np.allclose(c.weights, [0.775, 0.075, 0.075, 0.075])


def test_diamond_examples():
    ch = random_channel(2, 2, 2, 1)
    assert diamond_distance(ch, ch) == 0
    assert diamond_distance(identity(2), useless(2)) >= 1.5 - 1e-9
    tau = 0.2
    near = mix_with_useless(ch, tau / 2)
    d_near = diamond_distance(ch, near)
    assert 0 <= d_near <= tau / 2 * diamond_distance(ch, useless(2)) + 1e-9


def test_diamond_cptp_vs_zero_is_one():
    for seed in range(3):
        ch = random_channel(2, 2, 3, seed)
        assert np.isclose(diamond_distance(ch, zero_map(2)), 1.0, atol=1e-8)
    assert np.isclose(diamond_distance(amplitude_damping(0.4), zero_map(2)), 1.0, atol=1e-8)


@pytest.mark.parametrize("seed", range(4))
def test_diamond_matches_sdp_oracle(seed):
    a = random_channel(2, 2, 2, 100 + seed)
    b = random_channel(2, 2, 3, 200 + seed)
    est = diamond_distance(a, b)
    ref = diamond_sdp(a, b)
    assert est <= ref + 1e-6
    assert est >= ref - 1e-5


def test_diamond_matches_sdp_for_qutrit_to_qubit():
    a = random_channel(3, 2, 3, 11)
    b = random_channel(3, 2, 2, 12)
    assert abs(diamond_distance(a, b) - diamond_sdp(a, b)) < 1e-5


def test_diamond_triangle_inequality():
    chans = [random_channel(2, 2, 2, s) for s in range(3)]
    d01 = diamond_distance(chans[0], chans[1])
    d12 = diamond_distance(chans[1], chans[2])
    d02 = diamond_distance(chans[0], chans[2])
    assert d02 <= d01 + d12 + 1e-8


def test_pauli_distance_is_exact():
    pairs = [(phase_flip(0.1), phase_flip(0.2)), (depolarizing(0.1), depolarizing(0.3)), (bit_flip(0.05), phase_flip(0.3))]
    for a, b in pairs:
        exact = pauli_diamond_distance(pauli_probabilities(a), pauli_probabilities(b))
        assert np.isclose(diamond_distance(a, b), exact, atol=1e-8)
    assert pauli_probabilities(amplitude_damping(0.3)) is None


def test_diamond_estimate_restarts_are_monotone():
    est = diamond_estimate(random_channel(2, 2, 2, 3), random_channel(2, 2, 2, 4), restarts=5)
    assert np.all(np.diff(est.restart_values) >= 0)


def test_averaged_apply_examples():
    ch = depolarizing(0.2)
    rho = random_density(4, 3)
    single = AveragedChannel([ch], [1.0], 2)
    assert np.allclose(averaged_apply(single, rho), apply(tensor_power(ch, 2), rho))
    twin = AveragedChannel([ch, ch], [0.5, 0.5], 2)
    assert np.allclose(averaged_apply(twin, rho), averaged_apply(single, rho))


def test_fidelity_is_linear_over_the_average():
    members = [phase_flip(0.1), depolarizing(0.2), bit_flip(0.05)]
    lam = np.array([0.5, 0.3, 0.2])
    av = AveragedChannel(members, lam, 2)
    rec = random_channel(4, 4, 2, 9)
    rho = random_density(4, 8)
    lhs = composed_fidelity(rho, rec, av.as_channel())
    rhs = sum(w * composed_fidelity(rho, rec, tensor_power(m, 2)) for m, w in zip(members, lam))
    assert abs(lhs - rhs) < 1e-10


def test_mix_and_compose():
    a, b = phase_flip(0.1), bit_flip(0.3)
    rho = random_density(2, 0)
    assert np.allclose(apply(mix([a, b], [0.25, 0.75]), rho), 0.25 * apply(a, rho) + 0.75 * apply(b, rho))
    assert np.allclose(apply(compose(a, b), rho), apply(a, apply(b, rho)))


def test_reduction_property():
    ch = depolarizing(0.3)
    part = KrausChannel(ch.kraus[:2], trace_preserving=False)
    assert is_reduction_of(ch, part)
    assert not is_reduction_of(part, ch)


def test_json_round_trip():
    ch = random_channel(2, 3, 2, 5)
    back = channel_from_json(json.loads(json.dumps(channel_to_json(ch))))
    assert np.allclose(back.kraus, ch.kraus)
    assert np.allclose(builtin("phase_flip(0.1)").kraus, phase_flip(0.1).kraus)
    assert channel_from_json({"builtin": "useless(2)"}).n_kraus == 4
    with pytest.raises(ValueError):
        builtin("teleport(0.1)")


def test_random_channel_needs_enough_kraus():
    with pytest.raises(ValueError):
        random_channel(4, 1, 2, 0)
    ch = random_channel(3, 2, 2, 0, contraction=0.7)
    s = np.einsum("kji,kjl->il", ch.kraus.conj(), ch.kraus)
    assert np.linalg.eigvalsh(s).max() <= 1 + 1e-9
