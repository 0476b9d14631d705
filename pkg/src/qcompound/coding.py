"""One-shot random coding for averages of trace-decreasing channels.

Covers typical truncation of tensor-power channels, the Haar-averaged
fidelity lower bound for averaged channels, the decoupling quantities behind
it, Monte Carlo estimation over Haar-random codes, and two small arithmetic
lemmas (matrix inequality, floor ratios).
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from . import constants as C
from .channels import KrausChannel, apply, mix
from .errors import DimensionError, GuardError, HypothesisError, InvariantViolation
from .information import optimize_code_recovery
from .qmat import dagger, haar_unitary, hermitize, seed_for, trace_norm
from .typicality import (
    ProjectorCertificate,
    KrausCertificate,
    ReducedOperation,
    TypicalSpec,
    typical_kraus,
    typical_projector,
)


@dataclass(frozen=True)
class SubspaceFrame:
    """Code subspace given by an isometry with orthonormal columns."""

    isometry: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.isometry, dtype=complex)
        if v.ndim != 2 or v.shape[1] > v.shape[0]:
            raise DimensionError("frame must be a tall matrix")
        if np.max(np.abs(dagger(v) @ v - np.eye(v.shape[1]))) > 1e-10:
            raise ValueError("frame columns are not orthonormal")
        object.__setattr__(self, "isometry", v)

    @property
    def ambient(self) -> int:
        return self.isometry.shape[0]

    @property
    def k(self) -> int:
        return self.isometry.shape[1]

    def state(self) -> np.ndarray:
        return self.isometry @ dagger(self.isometry) / self.k

    @classmethod
    def standard(cls, ambient: int, k: int) -> "SubspaceFrame":
        return cls(np.eye(ambient, k, dtype=complex))


# ----------------------------------------------------------------------------
# truncation


@dataclass(frozen=True, eq=False)
class TruncatedChannel:
    """``q (sum_{w typical} a_w rho a_w^dagger) q`` with its typicality certificates.

    Kept lazy: the Kraus words are only multiplied out by :meth:`as_channel`.
    """

    reduced: ReducedOperation
    spec: TypicalSpec
    output_entropy: float
    output_certificate: ProjectorCertificate
    kraus_certificate: KrausCertificate

    @property
    def l(self) -> int:
        return self.spec.l

    @property
    def delta(self) -> float:
        return self.spec.delta

    @property
    def n_kraus(self) -> int:
        return self.reduced.n_words

    @property
    def in_dim(self) -> int:
        return self.reduced.in_dim**self.l

    @property
    def out_dim(self) -> int:
        return self.reduced.out_dim**self.l

    @cached_property
    def projector(self) -> np.ndarray:
        return self.spec.projector()

    def apply(self, rho) -> np.ndarray:
        q = self.projector
        return q @ self.reduced.apply(rho) @ q

    @cached_property
    def channel(self) -> KrausChannel:
        words = self.reduced.kraus_words()
        ops = np.einsum("xy,kyz->kxz", self.projector, words, optimize=True)
        return KrausChannel(ops, trace_preserving=False, validate=False, name="truncated")

    def as_channel(self) -> KrausChannel:
        return self.channel

    def exponent_bound(self) -> float:
        """Analytic bound ``2^{-l(S(N(pi_G)) - 3 phi(delta))}`` on ``||N_hat(pi_G^l)||_2^2``."""
        return 2.0 ** (-self.l * (self.output_entropy - 3 * self.output_certificate.phi))


def truncate_channel(ch: KrausChannel, pi_g, l: int, delta: float, c: float = C.TYPICAL_C,
                     c_prime: float = C.TYPICAL_C_PRIME) -> TruncatedChannel:
    """Compress the typical reduced operation of ``ch^{(x) l}`` onto the output-typical subspace.

    ``pi_g`` is the single-letter input state; the output-typical projector is
    the one of ``ch(pi_g)^{(x) l}``.
    """
    pi_g = np.asarray(pi_g, dtype=complex)
    red, cert_kraus = typical_kraus(ch, pi_g, l, delta, c_prime)
    spec, cert_proj = typical_projector(apply(ch, pi_g), l, delta, c)
    return TruncatedChannel(red, spec, cert_proj.entropy, cert_proj, cert_kraus)


def _apply_any(ch, rho):
    return ch.apply(rho) if isinstance(ch, TruncatedChannel) else apply(ch, rho)


def _as_kraus(ch) -> KrausChannel:
    return ch.as_channel() if isinstance(ch, TruncatedChannel) else ch


# ----------------------------------------------------------------------------
# one-shot bound


@dataclass(frozen=True)
class OneShotBoundReport:
    k: int
    n_kraus: tuple
    hs_norms: tuple
    trace: float
    bound: float
    exponent_bounds: tuple

    @property
    def vacuous(self) -> bool:
        return self.bound <= 0

    def to_dict(self) -> dict:
        return dict(self.__dict__, vacuous=self.vacuous)


def one_shot_value(trace: float, k: int, n_kraus: Sequence[int], hs_norms: Sequence[float]) -> float:
    return trace - 2 * sum(math.sqrt(k * n) * h for n, h in zip(n_kraus, hs_norms))


def one_shot_bound(channels: Sequence, k: int, pi_g) -> OneShotBoundReport:
    """``tr(N(pi_G)) - 2 sum_j sqrt(k n_j) ||N_j(pi_G)||_2`` with ``N`` the uniform average."""
    pi_g = np.asarray(pi_g, dtype=complex)
    if len({(c.in_dim, c.out_dim) for c in channels}) != 1:
        raise DimensionError("channels must share dimensions")
    rank = int(round(np.trace(pi_g).real / max(np.linalg.eigvalsh(hermitize(pi_g)).max(), 1e-300)))
    if k > rank:
        raise ValueError("k exceeds the dimension of G")
    outs = [_apply_any(c, pi_g) for c in channels]
    trace = float(np.mean([np.trace(o).real for o in outs]))
    hs = tuple(float(np.linalg.norm(o)) for o in outs)
    nk = tuple(c.n_kraus for c in channels)
    expo = tuple(c.exponent_bound() if isinstance(c, TruncatedChannel) else math.nan for c in channels)
    return OneShotBoundReport(k, nk, hs, trace, one_shot_value(trace, k, nk, hs), expo)


# ----------------------------------------------------------------------------
# decoupling quantities


class DecouplingGap(NamedTuple):
    w: float
    gap: float


def decoupling_gap(frame, ch: KrausChannel) -> DecouplingGap:
    """``w = tr(ch(pi_F))`` and ``||w rho'_ae - w rho_a (x) rho'_e||_1``.

    The reference system is compressed to ``C^k``; the purification is
    ``k^{-1/2} sum_m h_m (x) g_m`` with ``g_m`` the frame columns.
    """
    v = frame.isometry if isinstance(frame, SubspaceFrame) else np.asarray(frame, dtype=complex)
    k = v.shape[1]
    # t[m, x, i] = <x| a_i g_m> / sqrt(k)
    t = np.einsum("ixy,ym->mxi", ch.kraus, v) / math.sqrt(k)
    w = float(np.sum(np.abs(t) ** 2))
    n = t.shape[2]
    w_ae = np.einsum("mxi,nxj->minj", t, t.conj()).reshape(k * n, k * n)
    w_e = np.einsum("mxi,mxj->ij", t, t.conj())
    prod = np.kron(np.eye(k) / k, w_e)
    return DecouplingGap(w, trace_norm(hermitize(w_ae - prod)))


# ----------------------------------------------------------------------------
# D matrices


def _d_block_direct(p, aj, al, k):
    """Materialize ``D_{j,l}(p)`` as a block matrix and return its squared HS norm."""
    d = p.shape[0]
    nj, nl = aj.shape[0], al.shape[0]
    if d * d * nj * nl > C.DENSE_ENTRY_CAP:
        raise GuardError("D block too large to materialize")
    block = np.zeros((d * nj, d * nl), dtype=complex)
    for i in range(nj):
        for r in range(nl):
            m = dagger(aj[i]) @ al[r]
            pmp = p @ m @ p
            block[i * d:(i + 1) * d, r * d:(r + 1) * d] = (pmp - np.trace(pmp) / k * p) / k
    return float(np.sum(np.abs(block) ** 2))


def _d_block_formula(p, aj, al, k):
    """``(1/k^2) sum_ir [tr(p M^dagger p M) - |tr(p M)|^2 / k]`` with ``M = a_ji^dagger a_lr``."""
    m = np.einsum("iyx,ryz->irxz", aj.conj(), al)
    pm = np.einsum("xy,iryz->irxz", p, m)
    pmd = np.einsum("xy,irzy->irxz", p, m.conj())
    first = np.einsum("irxy,iryx->ir", pmd, pm)
    tr_pm = np.einsum("irxx->ir", pm)
    return float(np.real(np.sum(first - np.abs(tr_pm) ** 2 / k)) / k**2)


def d_matrices(frame, channels: Sequence[KrausChannel], check: bool = True) -> np.ndarray:
    """Matrix of ``||D_{j,l}(p)||_2^2`` with ``p`` the projector onto the code."""
    v = frame.isometry if isinstance(frame, SubspaceFrame) else np.asarray(frame, dtype=complex)
    k = v.shape[1]
    p = v @ dagger(v)
    nc = len(channels)
    out = np.zeros((nc, nc))
    for j in range(nc):
        for l in range(nc):
            val = _d_block_formula(p, channels[j].kraus, channels[l].kraus, k)
            if check:
                direct = _d_block_direct(p, channels[j].kraus, channels[l].kraus, k)
                if abs(val - direct) > C.ROUTE_AGREE_HS * max(1.0, abs(direct)):
                    raise InvariantViolation(f"D-matrix routes disagree: {val} vs {direct}")
            out[j, l] = val
    return out


class HaarMoments(NamedTuple):
    d_mean: np.ndarray
    d_stderr: np.ndarray
    d_bound: np.ndarray
    trace_mean: float
    trace_stderr: float
    trace_target: float
    samples: int

    @property
    def d_holds(self) -> np.ndarray:
        return self.d_mean <= self.d_bound + 3 * self.d_stderr

    @property
    def trace_holds(self) -> bool:
        return abs(self.trace_mean - self.trace_target) <= 3 * self.trace_stderr


def haar_moments(channels: Sequence[KrausChannel], g_frame, k: int, samples: int, seed: int) -> HaarMoments:
    """Empirical Haar averages of ``||D_{j,l}(U p U^dagger)||_2^2`` and ``tr(N(U pi_F U^dagger))``.

    Compared against ``<N_j(pi_G), N_l(pi_G)>_HS`` and ``tr(N(pi_G))``.
    """
    g = np.asarray(g_frame, dtype=complex)
    dim_g = g.shape[1]
    pi_g = g @ dagger(g) / dim_g
    avg = mix(channels, [1 / len(channels)] * len(channels))
    outs = [apply(c, pi_g) for c in channels]
    bound = np.array([[np.real(np.trace(a @ b)) for b in outs] for a in outs])
    target = float(np.trace(apply(avg, pi_g)).real)
    ds, trs = [], []
    for s in range(samples):
        u = haar_unitary(dim_g, seed_for(seed, s))
        f = g @ u[:, :k]
        ds.append(d_matrices(f, channels, check=False))
        trs.append(float(np.trace(apply(avg, f @ dagger(f) / k)).real))
    ds, trs = np.array(ds), np.array(trs)
    return HaarMoments(
        ds.mean(axis=0), ds.std(axis=0, ddof=1) / math.sqrt(samples), bound,
        float(trs.mean()), float(trs.std(ddof=1) / math.sqrt(samples)), target, samples,
    )


# ----------------------------------------------------------------------------
# matrix lemma


class MatrixLemma(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def matrix_lemma_check(lmat, dmat, tol: float = 1e-12) -> MatrixLemma:
    """``sum_jl (1/N) sqrt(L_jl D_jl) <= 2 sum_j sqrt(L_jj D_jj)`` under the lemma's hypotheses."""
    lm = np.asarray(lmat, dtype=float)
    dm = np.asarray(dmat, dtype=float)
    if lm.shape != dm.shape or lm.ndim != 2 or lm.shape[0] != lm.shape[1]:
        raise HypothesisError("L and D must be square and of equal size")
    if lm.min() < 0 or dm.min() < 0:
        raise HypothesisError("entries must be nonnegative")
    dl, dd = np.diag(lm), np.diag(dm)
    if np.any(lm > np.minimum(dl[:, None], dl[None, :]) + tol):
        raise HypothesisError("L_jl must not exceed L_jj or L_ll")
    if np.any(dm > np.maximum(dd[:, None], dd[None, :]) + tol):
        raise HypothesisError("D_jl must not exceed max(D_jj, D_ll)")
    n = lm.shape[0]
    lhs = float(np.sqrt(lm * dm).sum() / n)
    rhs = float(2 * np.sqrt(dl * dd).sum())
    return MatrixLemma(lhs, rhs, lhs <= rhs)


# ----------------------------------------------------------------------------
# Monte Carlo over Haar-random codes


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    fidelity: float
    w: float
    gap: float
    runtime_ms: float
    converged: bool

    @property
    def decoupling_holds(self) -> bool:
        return self.fidelity >= self.w - self.gap - 1e-9


@dataclass(frozen=True)
class MonteCarloResult:
    mean: float
    std: float
    stderr: float
    records: tuple

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["trial", "seed", "F_e", "w", "gap", "runtime_ms"])
            for r in self.records:
                wr.writerow([r.trial, r.seed, f"{r.fidelity:.12g}", f"{r.w:.12g}", f"{r.gap:.12g}", f"{r.runtime_ms:.3f}"])


def _trial(avg: KrausChannel, g: np.ndarray, k: int, seed: int, trial: int, iters: int) -> TrialRecord:
    start = time.perf_counter()
    s = seed_for(seed, trial)
    u = haar_unitary(g.shape[1], s)
    f = g @ u[:, :k]
    res = optimize_code_recovery(f, avg, iters=iters)
    dg = decoupling_gap(f, avg)
    ms = (time.perf_counter() - start) * 1e3
    return TrialRecord(trial, s, res.fidelity, dg.w, dg.gap, ms, res.converged)


def monte_carlo_fidelity(channels: Sequence, k: int, trials: int, seed: int, g_frame=None,
                         threads: int = 1, iters: int = 500) -> MonteCarloResult:
    """Achieved entanglement fidelity of Haar-random ``k``-dimensional codes for the average channel.

    The code for trial ``t`` is ``U F_0`` with ``F_0`` the first ``k`` basis
    vectors of ``G`` and ``U`` Haar on ``G``, seeded by ``(seed, t)``.
    Results do not depend on ``threads``.
    """
    chans = [_as_kraus(c) for c in channels]
    avg = mix(chans, [1 / len(chans)] * len(chans))
    g = np.eye(avg.in_dim, dtype=complex) if g_frame is None else np.asarray(g_frame, dtype=complex)
    if k > g.shape[1]:
        raise ValueError("k exceeds dim G")
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            recs = list(pool.map(lambda t: _trial(avg, g, k, seed, t, iters), range(trials)))
    else:
        recs = [_trial(avg, g, k, seed, t, iters) for t in range(trials)]
    vals = np.array([r.fidelity for r in recs])
    std = float(vals.std(ddof=1)) if trials > 1 else 0.0
    return MonteCarloResult(float(vals.mean()), std, std / math.sqrt(trials), tuple(recs))


# ----------------------------------------------------------------------------
# subcodes


class Subcode(NamedTuple):
    frame: SubspaceFrame
    fidelity: float
    parent_fidelity: float
    guarantee: float

    @property
    def holds(self) -> bool:
        return self.fidelity >= self.guarantee - 1e-12


def _code_fidelity(v, ch):
    k = v.shape[1]
    # F_e(pi_F, ch) = sum_i |tr(a_i V V^dagger)|^2 / k^2
    tr = np.einsum("xm,ixy,ym->i", v.conj(), ch.kraus, v)
    return float(np.sum(np.abs(tr) ** 2) / k**2)


def extract_subcode(code, ch: KrausChannel, K: int) -> Subcode:
    """Best of the ``floor(D/K)`` consecutive ``K``-blocks of the code's basis."""
    v = code.isometry if isinstance(code, SubspaceFrame) else np.asarray(code, dtype=complex)
    D = v.shape[1]
    if K > D or K < 1:
        raise ValueError("need 1 <= K <= dim C")
    parent = _code_fidelity(v, ch)
    blocks = D // K
    fids = [_code_fidelity(v[:, b * K:(b + 1) * K], ch) for b in range(blocks)]
    best = int(np.argmax(fids))
    guarantee = 1 - D / (blocks * K) * (1 - parent)
    return Subcode(SubspaceFrame(v[:, best * K:(best + 1) * K]), fids[best], parent, guarantee)


# ----------------------------------------------------------------------------
# floor arithmetic


def _iroot_floor(x: int, q: int) -> int:
    """Largest integer ``y`` with ``y^q <= x``."""
    if x < 2:
        return x
    lo, hi = 1, 1 << (x.bit_length() // q + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**q <= x:
            lo = mid
        else:
            hi = mid - 1
    return lo


def floor_pow2(e: Fraction) -> int:
    """``floor(2^e)`` exactly for a nonnegative rational exponent."""
    e = Fraction(e)
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    return _iroot_floor(2**e.numerator, e.denominator)


def _pow2_le(e: Fraction, r: Fraction) -> bool:
    """Exact test ``2^e <= r`` for rational ``e >= 0`` and rational ``r``."""
    if r <= 0:
        return False
    return Fraction(2) ** e.numerator <= r**e.denominator


def _pow2_ge(e: Fraction, r: Fraction) -> bool:
    return r <= 0 or Fraction(2) ** e.numerator >= r**e.denominator


class FloorCheck(NamedTuple):
    value: Fraction
    bound: float
    holds: bool
    stated_bound: float
    stated_holds: bool


def floor_ratio_check(n: int, A, B) -> FloorCheck:
    """``floor(2^{nA}) / (floor(2^{nB}) floor(floor(2^{nA})/floor(2^{nB})))`` against ``1 +- 3 2^{-nB}``.

    ``A`` and ``B`` are taken as exact rationals (floats via their decimal string).
    """
    A = Fraction(str(A)) if isinstance(A, float) else Fraction(A)
    B = Fraction(str(B)) if isinstance(B, float) else Fraction(B)
    if not (A > B > 0) or n < 1:
        raise HypothesisError("need A > B > 0 and n >= 1")
    a = floor_pow2(n * A)
    b = floor_pow2(n * B)
    value = Fraction(a, b * (a // b))
    e = n * B
    # value <= 1 + 3 2^{-e}  <=>  value <= 1  or  2^e <= 3 / (value - 1)
    holds = value <= 1 or _pow2_le(e, Fraction(3) / (value - 1))
    # value <= 1 - 3 2^{-e}  <=>  value < 1  and  2^e >= 3 / (1 - value)
    stated = value < 1 and _pow2_ge(e, Fraction(3) / (1 - value))
    two = 2.0 ** float(e)
    return FloorCheck(value, 1 + 3 / two, bool(holds), 1 - 3 / two, bool(stated))
