"""Entropies, fidelities and recovery optimization.

Logs are base 2.  Quantities with two independent evaluation routes compute
both and raise :class:`InvariantViolation` when they disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import constants as C
from .channels import KrausChannel, apply, apply_local, apply_power, canonical_kraus, complementary
from .errors import DimensionError, GuardError, InvariantViolation
from .qmat import dagger, density, hermitize, orthonormal_range, psd_power, purify


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def binary_entropy(p: float) -> float:
    return shannon_entropy([p, 1 - p])


def entropy(rho) -> float:
    """von Neumann entropy in bits (0 log 0 = 0)."""
    w = np.linalg.eigvalsh(hermitize(np.asarray(rho, dtype=complex)))
    return shannon_entropy(np.clip(w, 0.0, None))


# ----------------------------------------------------------------------------
# entanglement fidelity


def _fe_kraus(rho, kraus) -> float:
    return float(np.sum(np.abs(np.einsum("ij,kji->k", rho, kraus)) ** 2))


def _fe_purification(rho, kraus) -> float:
    psi = purify(rho)
    d = rho.shape[0]
    x = psi.vec.reshape(d, d)  # reference index first
    # <psi| (1 (x) a_k) |psi> for every Kraus operator
    overlaps = np.einsum("ah,kgh,ag->k", x, kraus, x.conj())
    return float(np.sum(np.abs(overlaps) ** 2))


def entanglement_fidelity(rho, ch: KrausChannel, check: bool = True) -> float:
    """``<psi|(id (x) ch)(|psi><psi|)|psi>`` for a purification ``psi`` of ``rho``."""
    rho = density(rho)
    if ch.in_dim != rho.shape[0] or ch.out_dim != ch.in_dim:
        raise DimensionError("entanglement fidelity needs a channel from the state's space to itself")
    val = _fe_kraus(rho, ch.kraus)
    if check and rho.shape[0] ** 2 <= C.PURIFICATION_ROUTE_CAP:
        other = _fe_purification(rho, ch.kraus)
        if abs(val - other) > C.ROUTE_AGREE_FE:
            raise InvariantViolation(f"F_e routes disagree: {val} vs {other}")
    return val


def composed_fidelity(rho, recovery: KrausChannel, ch: KrausChannel) -> float:
    """``F_e(rho, recovery o ch)`` without materializing the composition."""
    rho = np.asarray(rho, dtype=complex)
    # tr(rho r_j a_i) = sum_xy r_j[x,y] (a_i rho)[y,x]
    ar = np.einsum("iyz,zx->iyx", ch.kraus, rho)
    t = np.einsum("jxy,iyx->ji", recovery.kraus, ar, optimize=True)
    return float(np.sum(np.abs(t) ** 2))


# ----------------------------------------------------------------------------
# coherent information


def _rank_purification(rho):
    """Purification with the reference cut down to the rank of ``rho``."""
    w, v = np.linalg.eigh(hermitize(rho))
    keep = w > C.PINV_CUTOFF
    w, v = w[keep], v[:, keep]
    # psi = sum_m sqrt(w_m) f_m (x) v_m, stored as a (rank, d) matrix
    return np.sqrt(w)[:, None] * v.T


def _joint_output(rho, ch: KrausChannel, l: int = 1) -> np.ndarray:
    """``(id (x) ch^{(x) l})(|psi><psi|)`` with a rank-sized reference."""
    x = _rank_purification(rho)
    r, d = x.shape
    joint = np.einsum("ah,bg->ahbg", x, x.conj()).reshape(r * d, r * d)
    dims = [r] + [ch.in_dim] * l
    for site in range(1, l + 1):
        joint = apply_local(ch, joint, dims, site)
        dims[site] = ch.out_dim
    return joint


class CoherentInfo(NamedTuple):
    value: float
    output_entropy: float
    environment_entropy: float
    joint_entropy: float | None


def coherent_information_routes(rho, ch: KrausChannel, l: int = 1) -> CoherentInfo:
    """Both evaluations of ``I_c(rho, ch^{(x) l})``.

    The environment route is always computed; the purification route only when
    the joint output fits under the purification-route cap.
    """
    rho = density(rho)
    if rho.shape[0] != ch.in_dim**l:
        raise DimensionError("state does not fit the channel")
    out = apply_power(ch, rho, l) if l > 1 else apply(ch, rho)
    s_out = entropy(out)
    env = complementary(ch)
    s_env = entropy(apply_power(env, rho, l) if l > 1 else apply(env, rho))
    rank = int(np.sum(np.linalg.eigvalsh(rho) > C.PINV_CUTOFF))
    s_joint = None
    if rank * ch.out_dim**l <= C.PURIFICATION_ROUTE_CAP:
        s_joint = entropy(_joint_output(rho, ch, l))
    return CoherentInfo(s_out - (s_joint if s_joint is not None else s_env), s_out, s_env, s_joint)


def coherent_information(rho, ch: KrausChannel, l: int = 1, check: bool = True) -> float:
    """``S(ch(rho)) - S((id (x) ch)(|psi><psi|))``, cross-checked against ``S(ch(rho)) - S(E(rho))``."""
    ci = coherent_information_routes(rho, ch, l)
    if check and ci.joint_entropy is not None:
        if abs(ci.joint_entropy - ci.environment_entropy) > C.ROUTE_AGREE_IC:
            raise InvariantViolation(
                f"I_c routes disagree: {ci.output_entropy - ci.joint_entropy} vs "
                f"{ci.output_entropy - ci.environment_entropy}"
            )
    return ci.value


def entropy_exchange(pi_g, ch: KrausChannel, check: bool = True) -> float:
    """Shannon entropy of the canonical Kraus weights ``r(i) = tr(a_i pi_g a_i^dagger)``."""
    val = shannon_entropy(canonical_kraus(ch, pi_g).weights)
    if check:
        other = entropy(apply(complementary(ch), pi_g))
        if abs(val - other) > C.ROUTE_AGREE_SE:
            raise InvariantViolation(f"entropy exchange routes disagree: {val} vs {other}")
    return val


def fannes_bound(tau: float, d: int) -> float:
    """``tau log d - tau log tau`` for ``0 < tau <= 1/e``."""
    if not 0 < tau <= 1 / math.e + 1e-15:
        raise ValueError("tau must lie in (0, 1/e]")
    return tau * math.log2(d) - tau * math.log2(tau)


# ----------------------------------------------------------------------------
# recovery optimization


@dataclass(frozen=True, eq=False)
class RecoveryMap:
    """Recovery channel ``K -> H`` stored in compressed form.

    ``support`` (d x s0) spans the support of the reference state, ``outputs``
    (d' x s) spans the range of the noisy channel on it, and ``choi`` is the
    Choi matrix of the compressed map ``C^s -> C^s0`` (output factor first).
    Everything outside ``outputs`` is sent to the first support vector.
    """

    support: np.ndarray
    outputs: np.ndarray
    choi: np.ndarray

    @property
    def in_dim(self) -> int:
        return self.outputs.shape[0]

    @property
    def out_dim(self) -> int:
        return self.support.shape[0]

    def compressed_kraus(self) -> np.ndarray:
        s0, s = self.support.shape[1], self.outputs.shape[1]
        w, v = np.linalg.eigh(hermitize(self.choi))
        keep = w > C.PINV_CUTOFF * max(1.0, w.max(initial=0.0))
        return (v[:, keep] * np.sqrt(w[keep])).T.reshape(-1, s0, s)

    def to_channel(self, cap: int = C.DENSE_ENTRY_CAP) -> KrausChannel:
        small = self.compressed_kraus()
        comp = orthonormal_range(np.eye(self.in_dim) - self.outputs @ dagger(self.outputs))
        count = small.shape[0] + comp.shape[1]
        if count * self.in_dim * self.out_dim > cap:
            raise GuardError("recovery channel too large to materialize")
        ops = [self.support @ r @ dagger(self.outputs) for r in small]
        v0 = self.support[:, :1]
        ops += [v0 @ dagger(comp[:, [m]]) for m in range(comp.shape[1])]
        return KrausChannel(np.array(ops), name="recovery")


class RecoveryResult(NamedTuple):
    recovery: RecoveryMap
    fidelity: float
    converged: bool
    history: list


def _trace_out_first(j, s0, s):
    return np.einsum("xaxb->ab", j.reshape(s0, s, s0, s))


def _choi_from_kraus(kraus):
    vecs = kraus.reshape(kraus.shape[0], -1)
    return vecs.T @ vecs.conj()


def _rw_step(j, bm, s0, s):
    """One fixed-point step ``J -> T^{-1/2} M J M T^{-1/2}`` completed to trace preserving."""
    mjm = bm @ (dagger(bm) @ j @ bm) @ dagger(bm)
    t = _trace_out_first(mjm, s0, s)
    b = psd_power(t, -0.5, C.PINV_CUTOFF * max(1.0, np.abs(t).max()))
    proj = b @ t @ b
    ib = np.kron(np.eye(s0), b)
    new = ib @ mjm @ ib
    rest = np.eye(s) - proj
    if np.max(np.abs(rest)) > 1e-12:
        e0 = np.zeros((s0, s0))
        e0[0, 0] = 1.0
        new = new + np.kron(e0, rest)
    return hermitize(new)


def optimize_recovery(rho, ch: KrausChannel, iters: int = 500, tol: float = 1e-10) -> RecoveryResult:
    """Maximize ``F_e(rho, R o ch)`` over recovery channels ``R``.

    Starts from the transpose (Petz) channel ``rho^{1/2} a_i^dagger ch(rho)^{-1/2}``
    and improves its Choi matrix by the fixed-point iteration
    ``J -> T^{-1/2} M J M T^{-1/2}``, ``M`` being the linear fidelity functional.
    Steps that would lower the fidelity are retried with a shifted functional
    and otherwise end the run, so the recorded values never decrease.
    """
    rho = density(rho)
    w, v = np.linalg.eigh(rho)
    keep = w > C.PINV_CUTOFF
    return _optimize(v[:, keep], w[keep], ch, iters, tol)


def optimize_code_recovery(frame, ch: KrausChannel, iters: int = 500, tol: float = 1e-10) -> RecoveryResult:
    """:func:`optimize_recovery` for ``pi_F`` given by the isometry ``frame`` (columns span F)."""
    frame = np.asarray(frame, dtype=complex)
    k = frame.shape[1]
    return _optimize(frame, np.full(k, 1.0 / k), ch, iters, tol)


def _optimize(vs, lam, ch, iters, tol):
    a = ch.kraus
    if vs.shape[0] != ch.in_dim or ch.out_dim != ch.in_dim:
        raise DimensionError("recovery needs a channel from the state's space to itself")
    s0 = lam.size
    av = np.einsum("kij,jm->kim", a, vs)  # a_i V, shape (n, d', s0)
    ys = orthonormal_range(np.concatenate(list(av), axis=1))
    s = ys.shape[1]
    if s == 0:
        rm = RecoveryMap(vs, ys, np.zeros((0, 0), dtype=complex))
        return RecoveryResult(rm, 0.0, True, [0.0])
    at = np.einsum("ym,kmx->kyx", dagger(ys), av)  # compressed Kraus, (n, s, s0)

    # fidelity functional: F = tr(M J), M = B B^dagger, b_i = vec((A_i Lambda)^dagger)
    bm = np.conj(np.transpose(at * lam[None, None, :], (0, 2, 1))).reshape(a.shape[0], -1).T

    def fid(jm):
        return float(np.real(np.einsum("ai,ab,bi->", bm.conj(), jm, bm)))

    # Petz initializer
    n_out = np.einsum("kyx,x,kzx->yz", at, lam, at.conj())
    n_isqrt = psd_power(n_out, -0.5)
    petz = np.einsum("x,kyx,yz->kxz", np.sqrt(lam), at.conj(), n_isqrt)
    j = _choi_from_kraus(petz)
    rest = np.eye(s) - _trace_out_first(j, s0, s)
    if np.max(np.abs(rest)) > 1e-12:
        e0 = np.zeros((s0, s0))
        e0[0, 0] = 1.0
        j = j + np.kron(e0, hermitize(rest))
    val = fid(j)
    history = [val]
    converged = False
    scale = float(np.linalg.norm(bm, 2) ** 2) if bm.size else 0.0
    for _ in range(iters):
        cand = _rw_step(j, bm, s0, s)
        cv = fid(cand)
        if cv < val:
            for shift in (1.0, 4.0, 16.0):
                shifted = np.concatenate([bm, np.sqrt(shift * scale) * np.eye(bm.shape[0])], axis=1)
                cand = _rw_step(j, shifted, s0, s)
                cv = fid(cand)
                if cv >= val:
                    break
        if cv < val:
            converged = True
            break
        gain = cv - val
        j, val = cand, cv
        history.append(val)
        if gain < tol:
            converged = True
            break
    return RecoveryResult(RecoveryMap(vs, ys, j), val, converged, history)
