"""Quantum channels as Kraus families.

A :class:`KrausChannel` stores its Kraus operators as one array of shape
``(n, out_dim, in_dim)``.  Everything here is a pure function of immutable
channels; tensor powers can either be materialized (:func:`tensor_power`)
or applied site by site (:func:`apply_power`), which is how large block
lengths are handled.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from . import constants as C
from .errors import DimensionError, GuardError
from .qmat import (
    dagger,
    hermitize,
    kron,
    maximally_mixed,
    seed_for,
    random_pure,
)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Completely positive map ``rho -> sum_i a_i rho a_i^dagger``.

    ``trace_preserving=False`` marks a trace-decreasing map; construction
    checks ``sum a^dagger a = 1`` or ``<= 1`` accordingly.
    """

    kraus: np.ndarray
    trace_preserving: bool = True
    name: str = ""
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        k = np.asarray(self.kraus, dtype=complex)
        if k.ndim == 2:
            k = k[None]
        if k.ndim != 3:
            raise DimensionError(f"Kraus array must have 3 axes, got {k.shape}")
        object.__setattr__(self, "kraus", k)
        if self.validate:
            s = np.einsum("kji,kjl->il", k.conj(), k)
            if self.trace_preserving:
                err = np.max(np.abs(s - np.eye(k.shape[2])))
                if err > C.KRAUS_TP_TOL:
                    raise ValueError(f"Kraus operators are not trace preserving (defect {err:.2e})")
            else:
                top = np.linalg.eigvalsh(hermitize(s)).max(initial=0.0)
                if top > 1 + C.KRAUS_TP_TOL:
                    raise ValueError(f"Kraus operators are not trace decreasing (max eig {top:.6f})")

    @property
    def in_dim(self) -> int:
        return self.kraus.shape[2]

    @property
    def out_dim(self) -> int:
        return self.kraus.shape[1]

    @property
    def n_kraus(self) -> int:
        return self.kraus.shape[0]

    def __call__(self, rho):
        return apply(self, rho)

    def __repr__(self):
        tag = self.name or "KrausChannel"
        kind = "CPTP" if self.trace_preserving else "CPTD"
        return f"<{tag} {kind} {self.in_dim}->{self.out_dim}, {self.n_kraus} Kraus>"


# ----------------------------------------------------------------------------
# builtins


def identity(d: int = 2) -> KrausChannel:
    return KrausChannel(np.eye(d, dtype=complex)[None], name=f"identity({d})")


def useless(d_in: int = 2, d_out: int | None = None) -> KrausChannel:
    """Completely depolarizing map ``rho -> tr(rho) 1/d_out``."""
    d_out = d_in if d_out is None else d_out
    ops = np.zeros((d_out * d_in, d_out, d_in), dtype=complex)
    for i in range(d_out):
        for j in range(d_in):
            ops[i * d_in + j, i, j] = 1.0 / np.sqrt(d_out)
    return KrausChannel(ops, name=f"useless({d_in},{d_out})")


def zero_map(d_in: int = 2, d_out: int | None = None) -> KrausChannel:
    d_out = d_in if d_out is None else d_out
    return KrausChannel(np.zeros((1, d_out, d_in), dtype=complex), trace_preserving=False, name="zero")


def pauli_channel(probs: Sequence[float]) -> KrausChannel:
    """Qubit Pauli channel with probabilities for (I, X, Y, Z)."""
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (4,) or probs.min() < 0 or abs(probs.sum() - 1) > 1e-12:
        raise ValueError("need four nonnegative Pauli probabilities summing to one")
    ops = [np.sqrt(p) * PAULI[s] for p, s in zip(probs, "IXYZ") if p > 0]
    return KrausChannel(np.array(ops), name=f"pauli{tuple(np.round(probs, 6))}")


def phase_flip(p: float) -> KrausChannel:
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    ops = np.array([np.sqrt(1 - p) * PAULI["I"], np.sqrt(p) * PAULI["Z"]])
    return KrausChannel(ops, name=f"phase_flip({p:g})")


def bit_flip(p: float) -> KrausChannel:
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    ops = np.array([np.sqrt(1 - p) * PAULI["I"], np.sqrt(p) * PAULI["X"]])
    return KrausChannel(ops, name=f"bit_flip({p:g})")


def depolarizing(p: float) -> KrausChannel:
    """Qubit depolarizing channel ``(1-p) rho + p 1/2``."""
    if not 0 <= p <= 4 / 3:
        raise ValueError("p must lie in [0, 4/3]")
    ops = np.array(
        [np.sqrt(1 - 3 * p / 4) * PAULI["I"]] + [np.sqrt(p / 4) * PAULI[s] for s in "XYZ"]
    )
    return KrausChannel(ops, name=f"depolarizing({p:g})")


def amplitude_damping(gamma: float) -> KrausChannel:
    if not 0 <= gamma <= 1:
        raise ValueError("gamma must lie in [0, 1]")
    a0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    a1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel(np.array([a0, a1]), name=f"amplitude_damping({gamma:g})")


def unitary_channel(u) -> KrausChannel:
    return KrausChannel(np.asarray(u, dtype=complex)[None], name="unitary")


def random_channel(d_in: int, d_out: int, n_kraus: int, seed, contraction: float | None = None) -> KrausChannel:
    """Random channel: Ginibre Kraus operators normalized by ``S^{-1/2}``.

    With ``contraction`` in (0, 1] the Kraus operators are rescaled so that
    ``max eig(sum a^dagger a) = contraction`` and the result is CPTD.
    """
    if n_kraus * d_out < d_in:
        raise ValueError("a trace-preserving map needs n_kraus * d_out >= d_in")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n_kraus, d_out, d_in)) + 1j * rng.standard_normal((n_kraus, d_out, d_in))
    s = np.einsum("kji,kjl->il", g.conj(), g)
    ops = g @ _psd_power_inv_sqrt(s)
    if contraction is None:
        return KrausChannel(ops, name="random")
    # a generic trace-decreasing map: squeeze by a random positive contraction on the input
    h = rng.standard_normal((d_in, d_in)) + 1j * rng.standard_normal((d_in, d_in))
    m = h @ dagger(h)
    m = m / np.linalg.eigvalsh(m).max()
    ops = ops @ (np.sqrt(contraction) * _psd_sqrt(m))
    return KrausChannel(ops, trace_preserving=False, name="random_cptd")


def _psd_power_inv_sqrt(m):
    w, v = np.linalg.eigh(hermitize(m))
    return (v / np.sqrt(w)) @ dagger(v)


def _psd_sqrt(m):
    w, v = np.linalg.eigh(hermitize(m))
    return (v * np.sqrt(np.clip(w, 0, None))) @ dagger(v)


def mix(channels: Sequence[KrausChannel], weights: Sequence[float]) -> KrausChannel:
    """Convex combination ``sum_i w_i N_i`` as one Kraus family."""
    weights = np.asarray(weights, dtype=float)
    if len(channels) != len(weights) or weights.min() < 0 or abs(weights.sum() - 1) > 1e-12:
        raise ValueError("weights must be a probability vector matching the channels")
    _check_same_dims(channels)
    ops = np.concatenate([np.sqrt(w) * ch.kraus for ch, w in zip(channels, weights) if w > 0])
    tp = all(ch.trace_preserving for ch in channels)
    return KrausChannel(ops, trace_preserving=tp, name="mix")


def mix_with_useless(ch: KrausChannel, weight: float) -> KrausChannel:
    """``(1 - weight) ch + weight U`` with ``U`` the useless channel."""
    out = mix([ch, useless(ch.in_dim, ch.out_dim)], [1 - weight, weight])
    return KrausChannel(out.kraus, trace_preserving=ch.trace_preserving, name=f"mix({ch.name},U,{weight:g})")


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """``outer o inner``."""
    if outer.in_dim != inner.out_dim:
        raise DimensionError("composition dimensions do not match")
    ops = np.einsum("aij,bjk->abik", outer.kraus, inner.kraus).reshape(-1, outer.out_dim, inner.in_dim)
    tp = outer.trace_preserving and inner.trace_preserving
    return KrausChannel(ops, trace_preserving=tp, validate=False, name="compose")


def tensor(*channels: KrausChannel) -> KrausChannel:
    """Tensor product; Kraus words in lexicographic order."""
    ops = channels[0].kraus
    for ch in channels[1:]:
        ops = np.einsum("aij,bkl->abikjl", ops, ch.kraus)
        n, o1, o2, i1, i2 = ops.shape[0] * ops.shape[1], ops.shape[2], ops.shape[3], ops.shape[4], ops.shape[5]
        ops = ops.reshape(n, o1 * o2, i1 * i2)
    tp = all(ch.trace_preserving for ch in channels)
    return KrausChannel(ops, trace_preserving=tp, validate=False, name="tensor")


def _check_same_dims(channels):
    dims = {(ch.in_dim, ch.out_dim) for ch in channels}
    if len(dims) != 1:
        raise DimensionError(f"channels have differing dimensions {dims}")


# ----------------------------------------------------------------------------
# application


def apply(ch: KrausChannel, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.in_dim, ch.in_dim):
        raise DimensionError(f"state of shape {rho.shape} does not fit {ch!r}")
    a = ch.kraus
    return np.einsum("kij,jl,kml->im", a, rho, a.conj(), optimize=True)


def apply_local(ch: KrausChannel, rho: np.ndarray, dims: Sequence[int], site: int) -> np.ndarray:
    """Apply ``ch`` to tensor factor ``site`` of an operator on ``(x) dims``."""
    dims = list(dims)
    if dims[site] != ch.in_dim:
        raise DimensionError("site dimension does not match channel input")
    pre = int(np.prod(dims[:site]))
    post = int(np.prod(dims[site + 1 :]))
    rho = np.asarray(rho, dtype=complex)
    n_in = pre * dims[site] * post
    n_out = pre * ch.out_dim * post
    out = np.zeros((n_out, n_out), dtype=complex)
    for a in ch.kraus:
        out += conjugate_site(a, rho, pre, post, n_in)
    return out


def conjugate_site(a, rho, pre, post, n_cols):
    """``(1 (x) a (x) 1) rho (1 (x) a (x) 1)^dagger`` using two batched matmuls."""
    d_out, d_in = a.shape
    left = (a @ rho.reshape(pre, d_in, post * n_cols)).reshape(pre * d_out * post, n_cols)
    n_rows = left.shape[0]
    right = left.reshape(n_rows * pre, d_in, post)
    return (a.conj() @ right).reshape(n_rows, pre * d_out * post)


def apply_power(ch: KrausChannel, rho, l: int) -> np.ndarray:
    """``ch^{(x) l}(rho)`` computed one site at a time."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.in_dim**l, ch.in_dim**l):
        raise DimensionError("state does not fit the tensor power")
    dims = [ch.in_dim] * l
    for site in range(l):
        rho = apply_local(ch, rho, dims, site)
        dims[site] = ch.out_dim
    return rho


def apply_word(base_kraus: np.ndarray, word: Sequence[int], rho: np.ndarray) -> np.ndarray:
    """``a_w rho a_w^dagger`` for the product Kraus word ``a_{w1} (x) ... (x) a_{wl}``."""
    l = len(word)
    d_out, d_in = base_kraus.shape[1], base_kraus.shape[2]
    rho = np.asarray(rho, dtype=complex)
    for site, letter in enumerate(word):
        pre = d_out**site
        post = d_in ** (l - site - 1)
        rho = conjugate_site(base_kraus[letter], rho, pre, post, rho.shape[1])
    return rho


def word_operator(base_kraus: np.ndarray, word: Sequence[int]) -> np.ndarray:
    return kron(*[base_kraus[i] for i in word])


def tensor_power(ch: KrausChannel, l: int, cap: int = C.KRAUS_WORD_CAP) -> KrausChannel:
    """Materialized ``ch^{(x) l}``; Kraus words ordered lexicographically in ``y^l``."""
    if l < 1:
        raise ValueError("l must be positive")
    words = ch.n_kraus**l
    if words > cap:
        raise GuardError(f"tensor power would have {words} Kraus words (cap {cap})")
    if words * (ch.out_dim**l) * (ch.in_dim**l) > C.DENSE_ENTRY_CAP:
        raise GuardError("tensor power too large to materialize")
    out = tensor(*([ch] * l))
    return KrausChannel(out.kraus, trace_preserving=ch.trace_preserving, validate=False,
                        name=f"{ch.name or 'ch'}^{l}")


# ----------------------------------------------------------------------------
# dilations and representations


def stinespring(ch: KrausChannel) -> np.ndarray:
    """Operator ``v`` with ``v phi = sum_i (a_i phi) (x) e_i`` on ``K (x) H_e``."""
    n, do, di = ch.kraus.shape
    return np.transpose(ch.kraus, (1, 0, 2)).reshape(do * n, di)


def complementary(ch: KrausChannel) -> KrausChannel:
    """Complementary channel ``rho -> [tr(a_i rho a_j^dagger)]_{ij}`` on ``C^n``."""
    # Kraus operator b_x has rows <x| a_i, one for each output basis vector x
    ops = np.transpose(ch.kraus, (1, 0, 2)).copy()
    return KrausChannel(ops, trace_preserving=ch.trace_preserving, validate=False,
                        name=f"complement({ch.name})")


def transfer_matrix(ch: KrausChannel) -> np.ndarray:
    """Matrix ``T`` with ``vec(N(X)) = T vec(X)`` (row-major vec)."""
    a = ch.kraus
    return np.einsum("kij,klm->iljm", a, a.conj()).reshape(ch.out_dim**2, ch.in_dim**2)


def choi(ch: KrausChannel) -> np.ndarray:
    """Unnormalized Choi matrix ``sum_ij |i><j| (x) N(|i><j|)``."""
    a = ch.kraus
    d, do = ch.in_dim, ch.out_dim
    return np.einsum("kxi,kyj->ixjy", a, a.conj()).reshape(d * do, d * do)


def choi_of_difference(ch1: KrausChannel, ch2: KrausChannel) -> np.ndarray:
    return choi(ch1) - choi(ch2)


def is_reduction_of(full: KrausChannel, part: KrausChannel, tol: float = C.CHOI_PSD_TOL) -> bool:
    """True when ``full - part`` is completely positive."""
    diff = choi_of_difference(full, part)
    return bool(np.linalg.eigvalsh(hermitize(diff)).min() >= -tol)


def gram(ch: KrausChannel, sigma) -> np.ndarray:
    """``G_ij = tr(a_i sigma a_j^dagger)``."""
    a = ch.kraus
    return np.einsum("iab,bc,jac->ij", a, np.asarray(sigma, dtype=complex), a.conj(), optimize=True)


class CanonicalKraus(NamedTuple):
    channel: KrausChannel
    weights: np.ndarray
    mixing: np.ndarray


def canonical_kraus(ch: KrausChannel, pi_g) -> CanonicalKraus:
    """Kraus family of the same map whose Gram matrix w.r.t. ``pi_g`` is diagonal.

    Returns the rotated channel, the diagonal ``r(i) = tr(b_i pi_g b_i^dagger)``
    sorted descending, and the unitary ``W`` with ``b_k = sum_i W_ik a_i``.
    """
    g = gram(ch, pi_g)
    n = g.shape[0]
    off = np.max(np.abs(g - np.diag(np.diag(g)))) if n > 1 else 0.0
    if off <= 1e-12:
        r = np.real(np.diag(g)).copy()
        order = np.argsort(-r, kind="stable")
        w = np.eye(n, dtype=complex)[order]
    else:
        vals, vecs = np.linalg.eigh(hermitize(g))
        order = np.argsort(-vals, kind="stable")
        vecs = vecs[:, order]
        w = vecs.conj().T
        r = vals[order]
    ops = np.einsum("ki,iab->kab", w, ch.kraus)
    r = np.clip(np.real(r), 0.0, None)
    out = KrausChannel(ops, trace_preserving=ch.trace_preserving, validate=False, name=ch.name)
    return CanonicalKraus(out, r, w)


# ----------------------------------------------------------------------------
# diamond norm


class DiamondEstimate(NamedTuple):
    value: float
    converged: bool
    restart_values: list
    best_input: np.ndarray


def _difference_superops(ch1: KrausChannel, ch2: KrausChannel):
    if (ch1.in_dim, ch1.out_dim) != (ch2.in_dim, ch2.out_dim):
        raise DimensionError("channels must share dimensions")
    t = transfer_matrix(ch1) - transfer_matrix(ch2)
    return t, t.conj().T


def _forward(t, psi, d, do):
    x = psi.reshape(d, d)
    blocks = np.einsum("ah,bg->abhg", x, x.conj()).reshape(d * d, d * d)
    out = (blocks @ t.T).reshape(d, d, do, do)
    return hermitize(out.transpose(0, 2, 1, 3).reshape(d * do, d * do))


def _adjoint(s, w, d, do):
    blocks = w.reshape(d, do, d, do).transpose(0, 2, 1, 3).reshape(d * d, do * do)
    out = (blocks @ s.T).reshape(d, d, d, d)
    return hermitize(out.transpose(0, 2, 1, 3).reshape(d * d, d * d))


def _value(t, psi, d, do):
    return float(np.abs(np.linalg.eigvalsh(_forward(t, psi, d, do))).sum())


def _seesaw(t, s, psi, d, do, tol, max_iter):
    val = _value(t, psi, d, do)
    for _ in range(max_iter):
        w, v = np.linalg.eigh(_forward(t, psi, d, do))
        sign = (v * np.sign(w)) @ v.conj().T
        g = _adjoint(s, sign, d, do)
        _, gv = np.linalg.eigh(g)
        new = gv[:, -1]
        new_val = _value(t, new, d, do)
        if new_val < val:
            break
        gain = new_val - val
        psi, val = new, new_val
        if gain < tol:
            return psi, val, True
    return psi, val, False


def _polish(t, psi, val, d, do, tol, rng, rounds=3):
    """Coordinate search over real and imaginary parts of the input vector."""
    step = 1e-2
    for _ in range(rounds):
        improved = False
        for idx in rng.permutation(psi.size):
            for delta in (step, -step, 1j * step, -1j * step):
                cand = psi.copy()
                cand[idx] += delta
                cand /= np.linalg.norm(cand)
                cv = _value(t, cand, d, do)
                if cv > val + tol * 1e-3:
                    psi, val, improved = cand, cv, True
                    break
        if not improved:
            step /= 4
            if step < tol:
                break
    return psi, val


def diamond_estimate(ch1: KrausChannel, ch2: KrausChannel, restarts: int = 8, tol: float = 1e-9,
                     seed: int = 0, max_iter: int = 500, polish: bool = True) -> DiamondEstimate:
    """Certified lower estimate of ``||ch1 - ch2||_diamond``.

    Maximizes ``||(id_d (x) (ch1 - ch2))(|psi><psi|)||_1`` over pure inputs with
    a see-saw between the sign operator of the output and the top eigenvector
    of the adjoint image; every step is monotone.  The first start is the
    maximally entangled vector, the rest are random.
    """
    t, s = _difference_superops(ch1, ch2)
    d, do = ch1.in_dim, ch1.out_dim
    if not np.any(np.abs(t) > 1e-15):
        return DiamondEstimate(0.0, True, [0.0] * max(restarts, 1), np.eye(d).ravel() / np.sqrt(d))
    best, best_psi, converged_all, history = -1.0, None, True, []
    for r in range(max(restarts, 1)):
        if r == 0:
            psi = np.eye(d, dtype=complex).ravel() / np.sqrt(d)
        else:
            psi = random_pure(d * d, seed_for(seed, r))
        psi, val, conv = _seesaw(t, s, psi, d, do, tol, max_iter)
        if polish and d * d <= 64:
            psi, val = _polish(t, psi, val, d, do, tol, np.random.default_rng(seed_for(seed, r, 1)))
            psi, val, conv2 = _seesaw(t, s, psi, d, do, tol, max_iter)
            conv = conv or conv2
        converged_all &= conv
        if val > best:
            best, best_psi = val, psi
        history.append(best)
    return DiamondEstimate(best, converged_all, history, best_psi)


def diamond_distance(ch1: KrausChannel, ch2: KrausChannel, restarts: int = 8, tol: float = 1e-9,
                     seed: int = 0) -> float:
    return diamond_estimate(ch1, ch2, restarts=restarts, tol=tol, seed=seed).value


def pauli_probabilities(ch: KrausChannel) -> np.ndarray | None:
    """Pauli weights (I, X, Y, Z) if ``ch`` is a qubit Pauli channel, else None."""
    if (ch.in_dim, ch.out_dim) != (2, 2):
        return None
    chi = np.array([[np.trace(PAULI[p].conj().T @ a) / 2 for p in "IXYZ"] for a in ch.kraus])
    proc = chi.T @ chi.conj()
    if np.max(np.abs(proc - np.diag(np.diag(proc)))) > 1e-10:
        return None
    return np.real(np.diag(proc))


def pauli_diamond_distance(p, q) -> float:
    """Exact diamond distance of two Pauli channels: the l1 distance of their weights."""
    return float(np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)).sum())


# ----------------------------------------------------------------------------
# averaged channels


@dataclass(frozen=True, eq=False)
class AveragedChannel:
    members: tuple
    weights: np.ndarray
    block_length: int

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(self.members) != len(w):
            raise ValueError("one weight per member")
        if w.min() <= 0 or abs(w.sum() - 1) > 1e-12:
            raise ValueError("weights must be positive and sum to one")
        _check_same_dims(self.members)
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "weights", w)

    @property
    def in_dim(self) -> int:
        return self.members[0].in_dim ** self.block_length

    @property
    def out_dim(self) -> int:
        return self.members[0].out_dim ** self.block_length

    def as_channel(self, cap: int = C.KRAUS_WORD_CAP) -> KrausChannel:
        """Materialize ``sum_i lambda_i N_i^{(x) l}`` as one Kraus family."""
        powers = [tensor_power(m, self.block_length, cap) for m in self.members]
        return mix(powers, self.weights)


def averaged_apply(av: AveragedChannel, rho) -> np.ndarray:
    return sum(w * apply_power(m, rho, av.block_length) for m, w in zip(av.members, av.weights))


# ----------------------------------------------------------------------------
# file format

_BUILTINS = {
    "identity": lambda *a: identity(*(int(x) for x in a)) if a else identity(2),
    "useless": lambda *a: useless(*(int(x) for x in a)) if a else useless(2),
    "phase_flip": lambda p: phase_flip(float(p)),
    "bit_flip": lambda p: bit_flip(float(p)),
    "depolarizing": lambda p: depolarizing(float(p)),
    "amplitude_damping": lambda g: amplitude_damping(float(g)),
}

_CALL = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([^)]*)\))?\s*$")


def builtin(spec: str) -> KrausChannel:
    """Parse ``"phase_flip(0.1)"``-style names."""
    m = _CALL.match(spec)
    if not m or m.group(1) not in _BUILTINS:
        raise ValueError(f"unknown channel {spec!r}")
    args = [x for x in (m.group(2) or "").split(",") if x.strip()]
    return _BUILTINS[m.group(1)](*args)


def channel_to_json(ch: KrausChannel) -> dict:
    return {
        "in_dim": ch.in_dim,
        "out_dim": ch.out_dim,
        "kraus": [[[[float(z.real), float(z.imag)] for z in row] for row in a] for a in ch.kraus],
    }


def channel_from_json(obj) -> KrausChannel:
    if isinstance(obj, str):
        return builtin(obj)
    if "builtin" in obj:
        return builtin(obj["builtin"])
    ops = np.array([[[complex(re_, im) for re_, im in row] for row in a] for a in obj["kraus"]])
    if ops.shape[1:] != (obj["out_dim"], obj["in_dim"]):
        raise DimensionError("Kraus shapes disagree with declared dimensions")
    tp = obj.get("trace_preserving", True)
    return KrausChannel(ops, trace_preserving=tp)


def load_channel(path) -> KrausChannel:
    return channel_from_json(json.loads(Path(path).read_text()))


def save_channel(ch: KrausChannel, path) -> None:
    Path(path).write_text(json.dumps(channel_to_json(ch)))
