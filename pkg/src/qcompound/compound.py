"""Compound-channel pipelines built from the lower-level modules.

Parameterized channel families and their adapted nets, the approximation
estimates that tie a family to its net, channel discrimination with a pretty
good measurement, conversion of informed codes into compound codes, max-min
coherent information estimates and the block-length convergence table for
typical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize

from . import constants as C
from .channels import (
    KrausChannel,
    apply,
    apply_local,
    apply_power,
    bit_flip,
    depolarizing,
    diamond_estimate,
    mix_with_useless,
    pauli_diamond_distance,
    pauli_probabilities,
    phase_flip,
    tensor_power,
    useless,
)
from .coding import SubspaceFrame, extract_subcode
from .errors import DimensionError, GuardError
from .information import (
    coherent_information,
    coherent_information_routes,
    composed_fidelity,
    fannes_bound,
)
from .qmat import dagger, density, hermitize, kron, maximally_mixed, psd_power, random_density, seed_for, trace_norm
from .typicality import eta as eta_fn
from .typicality import h_state, phi, typical_projector

# ----------------------------------------------------------------------------
# families and nets


@dataclass(frozen=True)
class ParamFamily:
    """One-parameter channel family ``p -> N_p`` for ``p`` in ``[lo, hi]``.

    ``modulus`` is a Lipschitz constant in the diamond norm,
    ``||N_p - N_q|| <= modulus |p - q|``, and ``domain`` the full parameter range
    the base grid is laid over.
    """

    name: str
    lo: float
    hi: float
    make: Callable[[float], KrausChannel] = field(repr=False)
    modulus: float
    domain: tuple = (0.0, 1.0)

    def __call__(self, p: float) -> KrausChannel:
        return self.make(p)

    def sample(self, n: int) -> np.ndarray:
        return np.linspace(self.lo, self.hi, n)


FAMILIES = {
    "phase_flip": (phase_flip, 2.0, (0.0, 1.0)),
    "bit_flip": (bit_flip, 2.0, (0.0, 1.0)),
    "depolarizing": (depolarizing, 1.5, (0.0, 4.0 / 3.0)),
}


def family(name: str, lo: float, hi: float) -> ParamFamily:
    if name not in FAMILIES:
        raise ValueError(f"unknown family {name!r}")
    make, mod, dom = FAMILIES[name]
    if not dom[0] <= lo <= hi <= dom[1]:
        raise ValueError("interval outside the family's domain")
    return ParamFamily(name, lo, hi, make, mod, dom)


def net_cardinality_bound(tau: float, d: int, d_out: int) -> float:
    """``log2`` of ``(3/tau)^{2 (d d')^2}``."""
    if not 0 < tau <= 1:
        raise ValueError("tau must lie in (0, 1]")
    return 2 * (d * d_out) ** 2 * math.log2(3 / tau)


def adapted_cardinality_bound(tau: float, d: int, d_out: int) -> float:
    """``log2`` of ``(6/tau)^{2 (d d')^2}``."""
    return 2 * (d * d_out) ** 2 * math.log2(6 / tau)


@dataclass(frozen=True, eq=False)
class ChannelNet:
    tau: float
    members: tuple
    base_members: tuple
    params: tuple
    family: object
    mixed: bool
    grid_step: float
    covering_radius: float

    def __len__(self):
        return len(self.members)

    @property
    def log2_size(self) -> float:
        return math.log2(len(self.members))


def _distance(a: KrausChannel, b: KrausChannel, seed: int = 0) -> float:
    pa, pb = pauli_probabilities(a), pauli_probabilities(b)
    if pa is not None and pb is not None:
        return pauli_diamond_distance(pa, pb)
    return diamond_estimate(a, b, restarts=4, seed=seed).value


def build_adapted_net(fam, tau: float) -> ChannelNet:
    """Grid net over a family, restricted to points within ``tau/2`` of it, then mixed with ``U``.

    For a :class:`ParamFamily` the base grid has step ``tau/(4 modulus)``, so
    each family member is within ``tau/8`` of a grid point; the mixing then
    moves a member by ``(tau/2)||N - U||``.  A plain sequence of channels is
    used as its own base net.
    """
    if not 0 < tau <= 1 / math.e + 1e-15:
        raise ValueError("tau must lie in (0, 1/e]")
    if isinstance(fam, ParamFamily):
        step = tau / (4 * fam.modulus)
        lo, hi = fam.domain
        count = int(math.ceil((hi - lo) / step))
        grid = lo + step * (np.arange(count) + 0.5)
        grid = np.clip(grid, lo, hi)
        # distance from each grid point to the family interval, via the modulus
        gap = np.maximum(0.0, np.maximum(fam.lo - grid, grid - fam.hi))
        keep = fam.modulus * gap < tau / 2
        params = tuple(float(p) for p in grid[keep])
        base = tuple(fam(p) for p in params)
        # worst family-to-grid distance over the interval, by the modulus
        radius = fam.modulus * step / 2
    else:
        base = tuple(fam)
        if not base:
            raise ValueError("empty family")
        params = tuple(range(len(base)))
        step = 0.0
        radius = 0.0
    if radius >= tau / 2:
        raise GuardError("grid too coarse to certify the covering")
    members = tuple(mix_with_useless(ch, tau / 2) for ch in base)
    d, d_out = base[0].in_dim, base[0].out_dim
    if math.log2(len(members)) > adapted_cardinality_bound(tau, d, d_out):
        raise AssertionError("adapted net exceeds its cardinality bound")
    return ChannelNet(tau, members, base, params, fam, True, step, radius)


def nearest_member(net: ChannelNet, ch: KrausChannel) -> int:
    return int(np.argmin([_distance(ch, m) for m in net.members]))


def min_output_eigenvalue(ch: KrausChannel, samples: int = 64, seed: int = 0) -> float:
    """Smallest output eigenvalue over pure inputs (sampled plus basis states)."""
    rng = np.random.default_rng(seed)
    vals = []
    for s in range(samples + ch.in_dim):
        if s < ch.in_dim:
            v = np.eye(ch.in_dim)[s]
        else:
            v = rng.standard_normal(ch.in_dim) + 1j * rng.standard_normal(ch.in_dim)
            v /= np.linalg.norm(v)
        vals.append(np.linalg.eigvalsh(apply(ch, np.outer(v, v.conj()))).min())
    return float(min(vals))


def min_coherent_information(rho, channels: Sequence[KrausChannel], l: int = 1) -> float:
    """``min_N I_c(rho, N^{(x) l})`` over a finite family."""
    if not len(channels):
        raise ValueError("empty family")
    return float(min(coherent_information(rho, ch, l) for ch in channels))


def family_min_coherent_information(rho, fam: ParamFamily, samples: int = 201) -> float:
    """Infimum of ``I_c(rho, N_p)`` over a parameter family, on a dense grid including the endpoints."""
    return min_coherent_information(rho, [fam(p) for p in fam.sample(samples)])


# ----------------------------------------------------------------------------
# approximation estimates


@dataclass(frozen=True)
class ApproximationReport:
    l: int
    tau: float
    diamond_lower: float
    diamond_exact: float | None
    fidelity_gap: float
    ic_gap: float
    ic_bound: float

    @property
    def diamond_ok(self) -> bool:
        return self.diamond_lower < self.l * self.tau

    @property
    def fidelity_ok(self) -> bool:
        return self.fidelity_gap < self.l * self.tau

    @property
    def ic_ok(self) -> bool:
        return self.ic_gap <= self.ic_bound

    @property
    def consistent(self) -> bool:
        """Lower estimate never exceeds the exact value when that is known."""
        return self.diamond_exact is None or self.diamond_lower <= self.diamond_exact + 1e-9


def pauli_power_distance(p, q, l: int) -> float:
    """Exact diamond distance between tensor powers of two Pauli channels."""
    pp, qq = np.ones(1), np.ones(1)
    for _ in range(l):
        pp, qq = np.kron(pp, p), np.kron(qq, q)
    return float(np.abs(pp - qq).sum())


def approximation_check(pair, rho, l: int, recovery: KrausChannel, tau: float, seed: int = 0,
                        restarts: int = 4) -> ApproximationReport:
    """Tensor-power distance, fidelity shift under a fixed recovery, and I_c shift for one pair."""
    ch, member = pair
    rho = density(rho)
    big, big_m = tensor_power(ch, l), tensor_power(member, l)
    est = diamond_estimate(big, big_m, restarts=restarts, seed=seed).value
    pa, pb = pauli_probabilities(ch), pauli_probabilities(member)
    exact = pauli_power_distance(pa, pb, l) if pa is not None and pb is not None else None
    fgap = abs(composed_fidelity(rho, recovery, big) - composed_fidelity(rho, recovery, big_m))
    rho1 = _single_site(rho, ch.in_dim, l)
    icgap = abs(coherent_information(rho1, ch) - coherent_information(rho1, member))
    bound = tau + 2 * tau * math.log2(ch.in_dim / tau)
    return ApproximationReport(l, tau, est, exact, fgap, icgap, bound)


def _single_site(rho, d, l):
    if l == 1:
        return rho
    t = rho.reshape(d, d ** (l - 1), d, d ** (l - 1))
    return np.einsum("aibi->ab", t)


# ----------------------------------------------------------------------------
# max-min coherent information


def _ic_gradient(rho, ch: KrausChannel, l: int):
    """Value and gradient (w.r.t. rho) of ``S(N(rho)) - S(E(rho))`` for a tensor power."""
    from .channels import complementary

    env = complementary(ch)
    out = apply_power(ch, rho, l) if l > 1 else apply(ch, rho)
    eout = apply_power(env, rho, l) if l > 1 else apply(env, rho)

    def logm(m):
        w, v = np.linalg.eigh(hermitize(m))
        lw = np.log2(np.clip(w, 1e-15, None))
        return (v * lw) @ dagger(v), float(-(np.clip(w, 0, None) * lw).sum())

    lo, so = logm(out)
    le, se = logm(eout)
    adj = _adjoint_power(ch, lo, l)
    adj_e = _adjoint_power(env, le, l)
    return so - se, hermitize(-adj + adj_e)


def _adjoint_power(ch, x, l):
    adj = KrausChannel(np.conj(np.transpose(ch.kraus, (0, 2, 1))), validate=False)
    return apply_power(adj, x, l) if l > 1 else apply(adj, x)


def _project_density(m):
    """Euclidean projection of a Hermitian matrix onto density operators."""
    w, v = np.linalg.eigh(hermitize(m))
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1
    idx = np.arange(1, len(u) + 1)
    r = idx[u - css / idx > 0][-1]
    theta = css[r - 1] / r
    w = np.clip(w - theta, 0, None)
    return (v * w) @ dagger(v)


class CapacityEstimate(NamedTuple):
    rho: np.ndarray
    value: float
    start_values: list


def _maxmin_objective(rho, channels, l):
    return min(coherent_information_routes(rho, ch, l).value for ch in channels) / l


def compound_capacity_lower(channels: Sequence[KrausChannel], l: int = 1, restarts: int = 4,
                            steps: int = 300, seed: int = 0) -> CapacityEstimate:
    """Maximize ``min_i I_c(rho, N_i^{(x) l}) / l`` over density operators.

    Projected gradient ascent on a soft minimum whose temperature is raised
    in stages; starts are the normalized projectors onto the leading
    coordinate subspaces (the maximally mixed state among them) plus random
    states.  Every start's own value is part of the result, so the return is
    at least the best start.
    """
    d = channels[0].in_dim ** l
    if d > 64:
        raise GuardError("capacity search limited to dimension 64")
    starts = [np.diag(np.r_[np.ones(m), np.zeros(d - m)]) / m for m in range(d, 0, -1)]
    starts += [random_density(d, seed_for(seed, r)) for r in range(restarts)]
    best_rho, best_val, start_vals = None, -math.inf, []
    for rho0 in starts:
        rho = _project_density(rho0)
        val = _maxmin_objective(rho, channels, l)
        start_vals.append(val)
        if val > best_val:
            best_rho, best_val = rho, val
        for beta in (8.0, 64.0, 512.0, 4096.0):
            eta = 0.2
            for _ in range(steps // 4):
                parts = [_ic_gradient(rho, ch, l) for ch in channels]
                vals = np.array([p[0] for p in parts])
                wts = np.exp(-beta * (vals - vals.min()))
                wts /= wts.sum()
                grad = sum(w * p[1] for w, p in zip(wts, parts))
                soft = -np.log(np.sum(np.exp(-beta * (vals - vals.min())))) / beta + vals.min()
                moved = False
                while eta > 1e-8:
                    cand = _project_density(rho + eta * grad)
                    cvals = np.array([coherent_information_routes(cand, ch, l).value for ch in channels])
                    csoft = -np.log(np.sum(np.exp(-beta * (cvals - cvals.min())))) / beta + cvals.min()
                    if csoft > soft:
                        rho, moved = cand, True
                        eta *= 1.5
                        if cvals.min() / l > best_val:
                            best_rho, best_val = cand, cvals.min() / l
                        break
                    eta /= 2
                if not moved:
                    break
    return CapacityEstimate(best_rho, float(best_val), start_vals)


def _batch_entropy(ms):
    w = np.clip(np.linalg.eigvalsh(ms), 0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(w > 0, -w * np.log2(w), 0.0)
    return t.sum(axis=-1)


def bloch_scan(channels: Sequence[KrausChannel], resolution: float = 0.02) -> tuple:
    """Grid scan of the max-min coherent information over the qubit Bloch ball."""
    axis = np.arange(-1, 1 + resolution / 2, resolution)
    x, y, z = (g.ravel() for g in np.meshgrid(axis, axis, axis, indexing="ij"))
    inside = x * x + y * y + z * z <= 1 + 1e-12
    x, y, z = x[inside], y[inside], z[inside]
    rhos = 0.5 * np.stack([np.stack([1 + z, x - 1j * y], -1), np.stack([x + 1j * y, 1 - z], -1)], -2)
    vals = np.full(len(rhos), np.inf)
    for ch in channels:
        a = ch.kraus
        out = np.einsum("kab,nbc,kdc->nad", a, rhos, a.conj())
        env = np.einsum("iab,nbc,jac->nij", a, rhos, a.conj())
        vals = np.minimum(vals, _batch_entropy(out) - _batch_entropy(env))
    best = int(np.argmax(vals))
    return float(vals[best]), rhos[best]


# ----------------------------------------------------------------------------
# discrimination


@dataclass(frozen=True, eq=False)
class DiscriminationReport:
    probe: np.ndarray
    m: int
    povm: tuple
    success: np.ndarray
    pairwise_distance: np.ndarray
    indistinguishable: bool

    @property
    def per_member(self) -> np.ndarray:
        return np.diag(self.success).copy()

    @property
    def average(self) -> float:
        return float(np.mean(np.diag(self.success)))

    @property
    def worst(self) -> float:
        return float(np.min(np.diag(self.success)))


def pretty_good_measurement(states: Sequence[np.ndarray]) -> list:
    """``p_i = S^{-1/2} s_i S^{-1/2}`` with ``S = sum s_i``; the kernel of ``S`` goes to the first outcome."""
    total = sum(states)
    isq = psd_power(total, -0.5)
    povm = [hermitize(isq @ s @ isq) for s in states]
    w, v = np.linalg.eigh(hermitize(total))
    ker = v[:, w <= C.PINV_CUTOFF * max(1.0, w.max())]
    povm[0] = povm[0] + ker @ dagger(ker)
    return povm


def _min_pair_distance(v, channels):
    outs = [apply(ch, np.outer(v, v.conj())) for ch in channels]
    return min(trace_norm(outs[i] - outs[j]) for i in range(len(outs)) for j in range(i + 1, len(outs)))


def optimize_probe(channels: Sequence[KrausChannel], restarts: int = 6, seed: int = 0) -> np.ndarray:
    """Pure input maximizing the smallest pairwise output trace distance."""
    d = channels[0].in_dim
    candidates = [np.eye(d)[i].astype(complex) for i in range(d)]
    candidates += [np.ones(d, dtype=complex) / math.sqrt(d)]
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        candidates.append(v / np.linalg.norm(v))

    def neg(x):
        v = x[:d] + 1j * x[d:]
        n = np.linalg.norm(v)
        return 1.0 if n < 1e-12 else -_min_pair_distance(v / n, channels)

    best, best_val = None, -math.inf
    for v0 in candidates:
        res = minimize(neg, np.r_[v0.real, v0.imag], method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000})
        for x in (np.r_[v0.real, v0.imag], res.x):
            val = -neg(x)
            if val > best_val + 1e-12:
                v = x[:d] + 1j * x[d:]
                best, best_val = v / np.linalg.norm(v), val
    return best


def discriminate(channels: Sequence[KrausChannel], m: int, probe=None, seed: int = 0) -> DiscriminationReport:
    """Pretty good measurement on ``N_i^{(x) m}(probe^{(x) m})``."""
    if len(channels) < 2:
        raise ValueError("need at least two channels")
    d = channels[0].in_dim
    if channels[0].out_dim**m > 4096:
        raise GuardError("probe block too large")
    v = optimize_probe(channels, seed=seed) if probe is None else np.asarray(probe, dtype=complex)
    v = v / np.linalg.norm(v)
    omega = np.ones((1, 1), dtype=complex)
    for _ in range(m):
        omega = np.kron(omega, np.outer(v, v.conj()))
    outs = [apply_power(ch, omega, m) for ch in channels]
    n = len(outs)
    dist = np.array([[trace_norm(outs[i] - outs[j]) for j in range(n)] for i in range(n)])
    indist = bool(np.all(dist[~np.eye(n, dtype=bool)] < 1e-9))
    if indist:
        dim = outs[0].shape[0]
        povm = [np.eye(dim) / n for _ in range(n)]
    else:
        povm = pretty_good_measurement(outs)
    succ = np.array([[float(np.real(np.trace(p @ s))) for s in outs] for p in povm])
    return DiscriminationReport(v, m, tuple(povm), succ, dist, indist)


def fit_decay(ms: Sequence[int], worst: Sequence[float], n: int) -> float:
    """Fit ``f`` in ``1 - s_m ~ n f^m`` by least squares on the log scale."""
    ms = np.asarray(ms, dtype=float)
    err = np.clip(1 - np.asarray(worst, dtype=float), 1e-300, None)
    y = np.log2(err / n)
    slope = float(np.polyfit(ms, y, 1)[0]) if len(ms) > 1 else float(y[0] / ms[0])
    return 2.0**slope


# ----------------------------------------------------------------------------
# code conversion


def repetition_code(t: int, basis: str = "x") -> SubspaceFrame:
    """Two-dimensional repetition code on ``t`` qubits in the X or Z basis."""
    if basis == "z":
        zero, one = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    else:
        zero = np.array([1, 1], dtype=complex) / math.sqrt(2)
        one = np.array([1, -1], dtype=complex) / math.sqrt(2)
    a, b = np.ones(1, dtype=complex), np.ones(1, dtype=complex)
    for _ in range(t):
        a, b = np.kron(a, zero), np.kron(b, one)
    return SubspaceFrame(np.stack([a, b], axis=1))


def _estimate_then_reset(p: np.ndarray, omega_vec: np.ndarray) -> KrausChannel:
    """``Y -> omega tr(p Y)`` as Kraus operators ``|omega><x| p^{1/2}``."""
    root = psd_power(p, 0.5, cutoff=0.0)
    ops = np.einsum("a,xb->xab", omega_vec, root)
    return KrausChannel(ops, validate=False)


def _code_fidelity(frame: np.ndarray, recovery: KrausChannel, ch: KrausChannel) -> float:
    k = frame.shape[1]
    return composed_fidelity(frame @ dagger(frame) / k, recovery, ch)


@dataclass(frozen=True)
class ConversionResult:
    combined: np.ndarray
    factorized: np.ndarray
    success: np.ndarray
    informed: np.ndarray
    product_bound: np.ndarray
    code_dim: int

    @property
    def holds(self) -> np.ndarray:
        return self.combined >= self.product_bound - 1e-9


def _end_to_end(frame, probe_vec, ch, m, t, povm, recoveries):
    """``F_e(omega (x) pi_F, (sum_i Rhat_i (x) R_i) o N^{(x)(m+t)})`` with a compressed reference."""
    k = frame.shape[1]
    d = ch.in_dim
    omega_vec = np.ones(1, dtype=complex)
    for _ in range(m):
        omega_vec = np.kron(omega_vec, probe_vec)
    d_out = ch.out_dim
    dm, dt = d_out**m, d_out**t
    # purification sum_s h_s (x) omega (x) g_s / sqrt(k) on C^k (x) H^m (x) H^t
    psi = np.einsum("a,xs->sax", omega_vec, frame).reshape(-1) / math.sqrt(k)
    state = np.outer(psi, psi.conj())
    dims = [k] + [d] * (m + t)
    for site in range(1, m + t + 1):
        state = apply_local(ch, state, dims, site)
        dims[site] = d_out
    out = np.zeros_like(state)
    for p, rec in zip(povm, recoveries):
        block = KrausChannel(
            np.einsum("iab,jcd->ijacbd", _estimate_then_reset(p, omega_vec).kraus, rec.kraus).reshape(
                -1, dm * dt, dm * dt
            ),
            validate=False,
        )
        out += apply_local(block, state, [k, dm * dt], 1)
    return float(np.real(psi.conj() @ out @ psi))


def convert_code(frames, recoveries: Sequence[KrausChannel], channels: Sequence[KrausChannel], m: int, t: int,
                 report: DiscriminationReport | None = None) -> ConversionResult:
    """Combine a probe-estimation stage with informed codes into one code per member.

    ``frames`` is a single code (informed decoder) or one code per member
    (informed encoder; codes are first cut to a common dimension with
    :func:`extract_subcode`).  ``recoveries[i]`` decodes member ``i`` on
    ``t`` uses.  Returns per-member combined fidelity computed end to end,
    the factorized value ``sum_i success[i, j] F_e(code_j, R_i o N_j)``, and
    the product bound ``success[j, j] F_e(code_j, R_j o N_j)``.
    """
    n = len(channels)
    if isinstance(frames, (SubspaceFrame, np.ndarray)):
        frames = [frames] * n
    frames = [f.isometry if isinstance(f, SubspaceFrame) else np.asarray(f, dtype=complex) for f in frames]
    powers = [tensor_power(ch, t) for ch in channels]
    kdim = min(f.shape[1] for f in frames)
    if any(f.shape[1] != kdim for f in frames):
        from .channels import compose

        frames = [
            f if f.shape[1] == kdim else extract_subcode(f, compose(recoveries[j], powers[j]), kdim).frame.isometry
            for j, f in enumerate(frames)
        ]
    if n == 1:
        probe = np.eye(channels[0].in_dim)[0].astype(complex)
        povm = (np.eye(channels[0].out_dim**m),)
        succ = np.ones((1, 1))
    else:
        if report is None:
            report = discriminate(channels, m)
        if report.m != m:
            raise ValueError("discrimination report has a different m")
        probe, povm, succ = report.probe, report.povm, report.success
    informed = np.array([[_code_fidelity(frames[j], recoveries[i], powers[j]) for j in range(n)] for i in range(n)])
    factorized = np.array([sum(succ[i, j] * informed[i, j] for i in range(n)) for j in range(n)])
    bound = np.array([succ[j, j] * informed[j, j] for j in range(n)])
    combined = np.array([_end_to_end(frames[j], probe, channels[j], m, t, povm, recoveries) for j in range(n)])
    return ConversionResult(combined, factorized, succ, informed, bound, kdim)


# ----------------------------------------------------------------------------
# convergence of typical inputs


@dataclass(frozen=True)
class BsstRow:
    l: int
    delta: float
    tau: float
    rank: int
    mass: float
    eta: float
    value: float
    target: float
    deviation: float
    envelope: float
    envelope_measured: float


def _theta(l, delta, tau, dim_out, d, mass_term):
    return mass_term + 2 * phi(delta, d) - d * delta * math.log2(tau / (2 * dim_out))


def bsst_envelope(l, delta, tau, d, d_out, d_env, log_term) -> float:
    """Right-hand side of the block-length deviation bound given ``-(1/l) log`` of the mass factor."""
    lt = l * tau
    delta_l = (
        _theta(l, delta, tau, d_out, d, log_term)
        + _theta(l, delta, tau, d_env, d, log_term)
        + tau * math.log2(d_env / tau)
        + lt * math.log2(d_env / lt)
    )
    return delta_l + tau + 2 * lt * math.log2(d / lt) + tau + 2 * tau * math.log2(d / tau)


def bsst_check(rho, channels: Sequence[KrausChannel], l_grid: Sequence[int], delta_schedule,
               tau_schedule=None, c: float = C.TYPICAL_C) -> list:
    """Deviation of ``(1/l) min_i I_c(pi_{delta,l}, N_i^{(x) l})`` from ``min_i I_c(rho, N_i)``.

    ``delta_schedule`` and ``tau_schedule`` are callables of ``l`` (or
    constants).  The analytic envelope is infinite when the mass factor
    ``eta_l(delta)`` is not positive; ``envelope_measured`` uses the measured
    typical mass in its place.
    """
    rho = density(rho)
    d = rho.shape[0]
    d_out = channels[0].out_dim
    d_env = max(ch.n_kraus for ch in channels)
    dsched = delta_schedule if callable(delta_schedule) else (lambda l, v=delta_schedule: v)
    if tau_schedule is None:
        tsched = lambda l: 1 / (math.e * l * l)
    else:
        tsched = tau_schedule if callable(tau_schedule) else (lambda l, v=tau_schedule: v)
    target = min_coherent_information(rho, channels)
    rows = []
    for l in l_grid:
        if d**l > 256:
            raise GuardError("block length too large for the convergence table")
        delta, tau = dsched(l), tsched(l)
        spec, cert = typical_projector(rho, l, delta, c)
        value = min_coherent_information(spec.state(), channels, l) / l if spec.rank else math.nan
        et = eta_fn(l, delta, c, h_state(l, d))
        env = bsst_envelope(l, delta, tau, d, d_out, d_env, -math.log2(et) / l) if et > 0 else math.inf
        env_m = bsst_envelope(l, delta, tau, d, d_out, d_env, -math.log2(cert.mass) / l) if cert.mass > 0 else math.inf
        rows.append(BsstRow(l, delta, tau, spec.rank, cert.mass, et, value, target, abs(value - target), env, env_m))
    return rows
