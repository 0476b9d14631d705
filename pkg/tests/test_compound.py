import math

import numpy as np
import pytest
from oracles import binary_entropy, helstrom

from qcompound.channels import (
    apply,
    bit_flip,
    depolarizing,
    diamond_distance,
    identity,
    mix_with_useless,
    pauli_diamond_distance,
    pauli_probabilities,
    phase_flip,
    random_channel,
    tensor_power,
    useless,
)
from qcompound.coding import SubspaceFrame
from qcompound.compound import (
    adapted_cardinality_bound,
    approximation_check,
    bloch_scan,
    bsst_check,
    bsst_envelope,
    build_adapted_net,
    compound_capacity_lower,
    convert_code,
    discriminate,
    family,
    family_min_coherent_information,
    fit_decay,
    min_coherent_information,
    min_output_eigenvalue,
    net_cardinality_bound,
    pauli_power_distance,
    pretty_good_measurement,
    repetition_code,
)
from qcompound.information import coherent_information, optimize_code_recovery
from qcompound.qmat import maximally_mixed, random_density, trace_norm
from qcompound.typicality import eta, h_state, phi, typical_projector

PI2 = maximally_mixed(2)
PLUS = np.array([1, 1]) / np.sqrt(2)


def test_net_cardinality_bound_examples():
    assert np.isclose(net_cardinality_bound(1, 2, 2), 32 * math.log2(3))
    assert np.isclose(net_cardinality_bound(1, 2, 2), 50.72, atol=1e-2)
    assert np.isclose(2 ** net_cardinality_bound(1, 1, 1), 9)
    assert np.isclose(net_cardinality_bound(0.5, 2, 2), 32 * math.log2(6))


@pytest.mark.parametrize("tau", [0.1, 0.05, 0.02])
def test_adapted_net_covers_the_family(tau):
    fam = family("phase_flip", 0.0, 0.2)
    net = build_adapted_net(fam, tau)
    assert net.log2_size <= adapted_cardinality_bound(tau, 2, 2)
    probs = [pauli_probabilities(m) for m in net.members]
    for p in np.linspace(0, 0.2, 201):
        q = pauli_probabilities(fam(p))
        assert min(pauli_diamond_distance(q, r) for r in probs) < tau


def test_adapted_net_grid_respects_the_modulus():
    fam = family("phase_flip", 0.0, 0.2)
    for p, q in [(0.0, 0.01), (0.1, 0.13), (0.05, 0.2)]:
        assert diamond_distance(fam(p), fam(q)) <= fam.modulus * abs(p - q) + 1e-9
    fam = family("depolarizing", 0.0, 0.3)
    assert diamond_distance(fam(0.1), fam(0.2)) <= fam.modulus * 0.1 + 1e-9


def test_adapted_net_members_are_bounded_below():
    tau = 0.05
    net = build_adapted_net(family("bit_flip", 0.1, 0.15), tau)
    for m in net.members:
        assert min_output_eigenvalue(m) >= tau / 4 - 1e-12


def test_singleton_family_gives_singleton_net():
    ch = depolarizing(0.1)
    net = build_adapted_net([ch], 0.1)
    assert len(net) == 1
    assert np.allclose(apply(net.members[0], PI2), apply(ch, PI2))


def test_approximation_identical_pair_is_zero():
    ch = phase_flip(0.1)
    rec = random_channel(4, 4, 2, 0)
    r = approximation_check((ch, ch), random_density(4, 1), 2, rec, 0.05)
    assert r.diamond_lower == 0 and r.fidelity_gap == 0 and r.ic_gap == 0


def test_approximation_phase_flip_pair():
    tau = 0.05
    a, b = phase_flip(0.1), phase_flip(0.11)
    rec = random_channel(16, 16, 2, 3)
    r = approximation_check((a, b), random_density(16, 4), 4, rec, tau, restarts=2)
    assert r.fidelity_gap < 0.2
    assert r.diamond_ok and r.fidelity_ok and r.consistent
    assert np.isclose(r.diamond_exact, pauli_power_distance(pauli_probabilities(a), pauli_probabilities(b), 4))
    assert abs(r.diamond_lower - r.diamond_exact) < 1e-8


def test_approximation_singleton_mixed():
    tau = 0.1
    ch = depolarizing(0.2)
    mixed = mix_with_useless(ch, tau / 2)
    r = approximation_check((ch, mixed), random_density(2, 5), 1, identity(2), tau)
    assert r.ic_gap <= tau + 2 * tau * math.log2(2 / tau)
    assert r.ic_ok


def test_min_coherent_information_examples():
    ch = depolarizing(0.2)
    assert np.isclose(min_coherent_information(PI2, [ch]), coherent_information(PI2, ch))
    assert np.isclose(min_coherent_information(PI2, [identity(2), useless(2)]), -1)
    assert np.isclose(min_coherent_information(PI2, [phase_flip(0.05), phase_flip(0.1)]), 1 - binary_entropy(0.1))


def test_family_infimum_over_interval():
    fam = family("phase_flip", 0.0, 0.2)
    assert np.isclose(family_min_coherent_information(PI2, fam), 1 - binary_entropy(0.2))


def test_capacity_examples():
    est = compound_capacity_lower([identity(2)])
    assert abs(est.value - 1) < 1e-9
    assert trace_norm(est.rho - PI2) < 1e-6
    est = compound_capacity_lower([phase_flip(0.1)])
    assert abs(est.value - (1 - binary_entropy(0.1))) < 1e-4
    assert trace_norm(est.rho - PI2) < 0.01


def test_capacity_for_crossed_flips_matches_scan():
    chans = [bit_flip(0.1), phase_flip(0.1)]
    est = compound_capacity_lower(chans)
    scan, _ = bloch_scan(chans, 0.02)
    singles = [compound_capacity_lower([c]).value for c in chans]
    assert est.value <= min(singles) + 1e-9
    assert abs(est.value - scan) < 1e-3
    assert np.linalg.eigvalsh(est.rho).min() > 0.1  # interior maximizer


def test_capacity_is_at_least_every_uniform_start():
    chans = [depolarizing(0.05), bit_flip(0.2)]
    est = compound_capacity_lower(chans)
    for m in (1, 2):
        start = np.diag([1.0] * m + [0.0] * (2 - m)) / m
        assert est.value >= min_coherent_information(start, chans) - 1e-12


def test_pgm_is_complete():
    states = [random_density(3, s, rank=2) for s in range(3)]
    povm = pretty_good_measurement(states)
    assert np.allclose(sum(povm), np.eye(3), atol=1e-9)
    assert all(np.linalg.eigvalsh(p).min() > -1e-10 for p in povm)


def test_discriminate_identity_vs_useless():
    rep = discriminate([identity(2), useless(2)], 1, probe=[1, 0])
    assert np.allclose(rep.per_member, [2 / 3, 2 / 3])
    opt = helstrom(np.diag([1.0, 0.0]), PI2)
    assert np.isclose(opt, 0.75)
    assert rep.average >= opt**2
    assert np.allclose(rep.success.sum(axis=0), 1)


def test_discriminate_identical_members():
    rep = discriminate([phase_flip(0.1)] * 3, 2, probe=PLUS)
    assert rep.indistinguishable
    assert np.allclose(rep.per_member, 1 / 3)


def test_discriminate_binomial_oracle():
    chans = [phase_flip(0.0), phase_flip(0.3)]
    succ = [discriminate(chans, m, probe=PLUS).worst for m in range(1, 7)]
    assert np.all(np.diff(succ) > 0)
    for m, s in zip(range(1, 7), succ):
        best = 1 - 0.5 * 0.7**m
        assert s <= best + 1e-12
    assert succ[-1] > 0.85


def test_probe_search_finds_equatorial_input():
    rep = discriminate([phase_flip(0.02), phase_flip(0.25)], 1)
    v = rep.probe
    assert np.isclose(abs(v[0]) ** 2, 0.5, atol=1e-4)


def test_fit_decay_recovers_rate():
    ms = np.arange(1, 7)
    worst = 1 - 2 * 0.6**ms
    assert np.isclose(fit_decay(ms, worst, 2), 0.6)


def test_convert_single_member_is_identity():
    ch = phase_flip(0.1)
    code = repetition_code(3)
    rec = optimize_code_recovery(code.isometry, tensor_power(ch, 3)).recovery.to_channel()
    res = convert_code(code, [rec], [ch], 1, 3)
    assert np.allclose(res.combined, res.informed[0, 0])


def test_convert_identity_vs_useless():
    chans = [identity(2), useless(2)]
    code = SubspaceFrame.standard(2, 2)
    recs = [identity(2), identity(2)]
    rep = discriminate(chans, 1, probe=[1, 0])
    res = convert_code(code, recs, chans, 1, 1, rep)
    assert res.combined[0] >= rep.success[0, 0] * 1 - 1e-12
    assert np.allclose(res.combined, res.factorized, atol=1e-10)
    assert res.holds.all()


def test_convert_informed_encoder_equalizes_dimensions():
    chans = [phase_flip(0.05), bit_flip(0.05)]
    codes = [repetition_code(2, "x"), SubspaceFrame(np.eye(4)[:, :3])]
    recs = [
        optimize_code_recovery(codes[0].isometry, tensor_power(chans[0], 2)).recovery.to_channel(),
        optimize_code_recovery(codes[1].isometry, tensor_power(chans[1], 2)).recovery.to_channel(),
    ]
    res = convert_code(codes, recs, chans, 2, 2)
    assert res.code_dim == 2
    assert np.allclose(res.combined, res.factorized, atol=1e-10)
    assert res.holds.all()


def test_convert_phase_flip_pair():
    chans = [phase_flip(0.02), phase_flip(0.25)]
    code = repetition_code(4)
    recs = [optimize_code_recovery(code.isometry, tensor_power(c, 4)).recovery.to_channel() for c in chans]
    res = convert_code(code, recs, chans, 4, 4, discriminate(chans, 4, probe=PLUS))
    assert np.allclose(res.combined, res.factorized, atol=1e-10)
    assert res.holds.all()


def test_bsst_uniform_state():
    rows = bsst_check(PI2, [phase_flip(0.1)], [2, 4], 0.3)
    for r in rows:
        spec, _ = typical_projector(PI2, r.l, 0.3)
        assert r.rank == spec.rank
        assert r.rank < 2**r.l
    assert all(r.deviation <= r.envelope for r in rows)


def test_bsst_envelope_plug_in():
    l, delta, tau = 4, 0.45, 1 / (math.e * 16)
    et = eta(l, delta, 1 / (2 * math.log(2)), h_state(l, 2))
    assert et <= 0
    rows = bsst_check(np.diag([0.9, 0.1]), [phase_flip(0.1)], [4], delta)
    assert rows[0].envelope == math.inf
    log_term = -math.log2(rows[0].mass) / l
    theta = log_term + 2 * phi(delta, 2) - 2 * delta * math.log2(tau / 4)
    expected = 2 * theta + tau * math.log2(2 / tau) + l * tau * math.log2(2 / (l * tau))
    expected += tau + 2 * l * tau * math.log2(2 / (l * tau)) + tau + 2 * tau * math.log2(2 / tau)
    assert np.isclose(rows[0].envelope_measured, expected)
    assert np.isclose(bsst_envelope(l, delta, tau, 2, 2, 2, log_term), expected)
