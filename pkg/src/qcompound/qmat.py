"""Dense complex linear algebra for small quantum systems.

Operators are plain ``numpy`` arrays of dtype ``complex128``.  Bipartite
vectors and operators use the row-major Kronecker convention, so the first
tensor factor is the slowest-varying index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import constants as C
from .errors import DimensionError


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermitian_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + dagger(m))


def eigh_desc(m: np.ndarray, tol: float = C.HERMITIAN_TOL):
    """Eigendecomposition of a Hermitian matrix with eigenvalues descending."""
    m = as_matrix(m)
    if hermitian_defect(m) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(hermitize(m))
    return w[::-1], v[:, ::-1]


def density(m, tol: float = C.PSD_CLAMP_TOL) -> np.ndarray:
    """Validate a density operator and return a cleaned copy.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero and the trace is
    renormalized; anything more negative is rejected.
    """
    rho = as_matrix(m)
    if rho.shape[0] != rho.shape[1]:
        raise DimensionError("density operator must be square")
    if hermitian_defect(rho) > C.HERMITIAN_TOL:
        raise ValueError("density operator is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > C.TRACE_TOL:
        raise ValueError(f"density operator has trace {np.trace(rho).real!r}")
    w, v = np.linalg.eigh(hermitize(rho))
    if w.min() < -tol:
        raise ValueError(f"density operator has eigenvalue {w.min():.3e}")
    if w.min() < 0:
        w = np.clip(w, 0.0, None)
        w = w / w.sum()
        return (v * w) @ dagger(v)
    return hermitize(rho)


def psd_clamp(m: np.ndarray) -> np.ndarray:
    """Project a Hermitian matrix onto the PSD cone (drop negative part)."""
    w, v = np.linalg.eigh(hermitize(m))
    w = np.clip(w, 0.0, None)
    return (v * w) @ dagger(v)


def kron(*ops) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, as_matrix(op))
    return out


def kron_power(op, n: int) -> np.ndarray:
    return kron(*([op] * n))


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex) / d


def projector_state(frame: np.ndarray) -> np.ndarray:
    """Maximally mixed state on the span of the orthonormal columns of ``frame``."""
    frame = as_matrix(frame)
    return frame @ dagger(frame) / frame.shape[1]


def ket(index: int, d: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[index] = 1.0
    return v


def pure(vec) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex).ravel()
    return np.outer(vec, vec.conj())


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Partial trace of an operator on a tensor product.

    ``keep`` is ``"A"``/``"B"`` for a bipartition, or an index / list of
    indices into ``dims`` naming the factors that survive.
    """
    m = as_matrix(m)
    dims = [int(x) for x in dims]
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise DimensionError(f"operator of shape {m.shape} does not match dims {dims}")
    if isinstance(keep, str):
        if len(dims) != 2 or keep not in ("A", "B"):
            raise ValueError("keep='A'/'B' needs exactly two factors")
        keep = [0] if keep == "A" else [1]
    elif np.isscalar(keep):
        keep = [int(keep)]
    keep = sorted(int(k) for k in keep)
    n = len(dims)
    t = m.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # contract traced factors pairwise, highest index first so axes stay valid
    for k, i in enumerate(sorted(traced, reverse=True)):
        cur = n - k
        t = np.trace(t, axis1=i, axis2=i + cur)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(dk, dk)


@dataclass(frozen=True)
class PureState:
    vec: np.ndarray
    dims: tuple

    def operator(self) -> np.ndarray:
        return pure(self.vec)


def _canonical_eigenbasis(rho: np.ndarray):
    w, v = np.linalg.eigh(hermitize(rho))
    # fix the phase: first entry of largest modulus made real positive
    for j in range(v.shape[1]):
        col = v[:, j]
        idx = int(np.argmax(np.abs(col) > 1e-12))
        phase = col[idx] / abs(col[idx])
        v[:, j] = col / phase
    keys = [(-round(float(w[j]), 12),) + tuple(np.round(-np.abs(v[:, j]), 12)) for j in range(len(w))]
    order = sorted(range(len(w)), key=lambda j: keys[j])
    return np.clip(w[order], 0.0, None), v[:, order]


def purify(rho) -> PureState:
    """Canonical purification ``sum_i sqrt(l_i) e_i (x) e_i`` on ``H_a (x) H``.

    Eigenvalues are taken in descending order; the reference factor comes
    first, so tracing out factor 0 gives back ``rho``.
    """
    rho = density(rho)
    d = rho.shape[0]
    w, v = _canonical_eigenbasis(rho)
    psi = np.zeros(d * d, dtype=complex)
    for lam, e in zip(w, v.T):
        if lam > 0:
            psi += np.sqrt(lam) * np.kron(e, e)
    psi /= np.linalg.norm(psi)
    return PureState(psi, (d, d))


def haar_unitary(dim: int, seed) -> np.ndarray:
    """Haar-distributed unitary from QR of a complex Ginibre matrix.

    The diagonal of ``R`` is made positive so the distribution is exactly Haar.
    ``seed`` may be an int or anything ``numpy.random.default_rng`` accepts.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    ph = diag / np.abs(diag)
    return q * ph


def random_density(d: int, seed, rank: int | None = None) -> np.ndarray:
    """Random density operator (induced measure from a Ginibre matrix)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ dagger(g)
    return hermitize(rho / np.trace(rho).real)


def random_pure(d: int, seed) -> np.ndarray:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


class Norms(NamedTuple):
    trace_norm: float
    hs_norm: float
    operator_norm: float


def norms(m) -> Norms:
    s = np.linalg.svd(as_matrix(m), compute_uv=False)
    return Norms(float(s.sum()), float(np.sqrt(np.sum(s**2))), float(s.max(initial=0.0)))


def trace_norm(m) -> float:
    m = as_matrix(m)
    if m.shape[0] == m.shape[1] and hermitian_defect(m) < 1e-12:
        return float(np.abs(np.linalg.eigvalsh(hermitize(m))).sum())
    return float(np.linalg.svd(m, compute_uv=False).sum())


def hs_inner(a, b) -> complex:
    return complex(np.vdot(as_matrix(a), as_matrix(b)))


def psd_power(m: np.ndarray, power: float, cutoff: float = C.PINV_CUTOFF) -> np.ndarray:
    """``m**power`` for PSD ``m``; negative powers act as pseudo-inverse on the support."""
    w, v = np.linalg.eigh(hermitize(m))
    keep = w > cutoff
    wp = np.zeros_like(w)
    wp[keep] = w[keep] ** power
    return (v * wp) @ dagger(v)


def support_projector(m: np.ndarray, cutoff: float = C.PINV_CUTOFF) -> np.ndarray:
    w, v = np.linalg.eigh(hermitize(m))
    vs = v[:, w > cutoff]
    return vs @ dagger(vs)


def orthonormal_range(m: np.ndarray, cutoff: float = C.PINV_CUTOFF) -> np.ndarray:
    """Orthonormal basis (as columns) of the column space of ``m``."""
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    scale = max(1.0, float(s.max(initial=0.0)))
    return u[:, s > cutoff * scale]


def is_unitary(u: np.ndarray, tol: float = C.UNITARY_TOL) -> bool:
    u = as_matrix(u)
    return bool(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[1]))) <= tol)


def seed_for(seed: int, *keys: int) -> int:
    """Child seed derived from ``seed`` and a tuple of indices (order-free, splittable)."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(k) for k in keys]])
    return int(ss.generate_state(2, dtype=np.uint32).astype(np.uint64) @ np.array([1, 2**32], dtype=np.uint64))
