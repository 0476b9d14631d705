"""Frequency typicality for states and for Kraus families.

Typical sets are enumerated by type (letter counts), never by raw sequence,
so block lengths up to about 20 stay cheap.  Operators on ``H^{(x) l}`` are
kept implicit: a typical projector is a boolean mask over the product
eigenbasis, and a reduced operation is a list of count types over a single
Kraus alphabet.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import constants as C
from .channels import KrausChannel, canonical_kraus, conjugate_site, word_operator
from .errors import GuardError
from .qmat import dagger, density, eigh_desc, hermitize

_MARGIN = 1e-12


def phi(delta: float, d: int) -> float:
    """Entropy slack ``-delta log(delta/d)``."""
    return -delta * math.log2(delta / d)


def h_state(l: int, d: int) -> float:
    """Type-counting penalty ``(d/l) log(l+1)`` for the state alphabet."""
    return d / l * math.log2(l + 1)


def h_kraus(l: int, d: int) -> float:
    """Type-counting penalty ``(d^2/l) log(l+1)`` used for Kraus alphabets."""
    return d * d / l * math.log2(l + 1)


def gamma_default(delta: float, n_kraus: int) -> float:
    """Count slack ``-delta log(delta/n)`` for a Kraus alphabet of size ``n``."""
    return -delta * math.log2(delta / n_kraus)


def eta(l: int, delta: float, c: float, h: float) -> float:
    return 1.0 - 2.0 ** (-l * (c * delta * delta - h))


def largest_c(mass: float, l: int, delta: float, h: float) -> float:
    """Largest ``c`` with ``mass >= 1 - 2^{-l(c delta^2 - h)}``."""
    if mass >= 1.0:
        return math.inf
    return (h - math.log2(1.0 - mass) / l) / (delta * delta)


def _guard(l: int, d: int):
    if l > C.TYPICAL_MAX_L or d > C.TYPICAL_MAX_ALPHABET:
        raise GuardError(f"typical enumeration limited to l <= {C.TYPICAL_MAX_L}, alphabet <= {C.TYPICAL_MAX_ALPHABET}")


def compositions(l: int, d: int) -> Iterator[tuple]:
    """All count vectors of ``d`` nonnegative integers summing to ``l``."""
    if d == 1:
        yield (l,)
        return
    for first in range(l, -1, -1):
        for rest in compositions(l - first, d - 1):
            yield (first,) + rest


def multinomial(counts: Sequence[int]) -> int:
    out, total = 1, 0
    for c in counts:
        total += c
        out *= math.comb(total, c)
    return out


def type_distance(counts: Sequence[int], base: np.ndarray) -> float:
    l = sum(counts)
    return float(np.abs(np.asarray(counts, dtype=float) / l - base).sum())


def is_typical(counts: Sequence[int], base: np.ndarray, delta: float) -> bool:
    if any(c > 0 and b <= 0 for c, b in zip(counts, base)):
        return False
    return type_distance(counts, base) < delta - _MARGIN


def type_probability(counts: Sequence[int], base: np.ndarray) -> float:
    """Probability of one sequence of the given type."""
    return float(np.prod([b**c for b, c in zip(base, counts)]))


@dataclass(frozen=True)
class TypicalSet:
    base: np.ndarray
    l: int
    delta: float
    types: tuple

    @property
    def size(self) -> int:
        return sum(multinomial(t) for t in self.types)

    @property
    def mass(self) -> float:
        return float(sum(multinomial(t) * type_probability(t, self.base) for t in self.types))

    def sequences(self) -> Iterator[tuple]:
        """Members in lexicographic order."""
        want = set(self.types)
        d = len(self.base)
        for seq in itertools.product(range(d), repeat=self.l):
            counts = tuple(seq.count(a) for a in range(d))
            if counts in want:
                yield seq

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return self.sequences()


def typical_set(base, l: int, delta: float) -> TypicalSet:
    """Sequences whose empirical distribution is ``delta``-close to ``base`` in l1."""
    base = np.asarray(base, dtype=float)
    if abs(base.sum() - 1) > 1e-12 or base.min() < 0:
        raise ValueError("base must be a probability vector")
    _guard(l, len(base))
    types = tuple(t for t in compositions(l, len(base)) if is_typical(t, base, delta))
    return TypicalSet(base, l, delta, types)


def _type_codes(l: int, d: int) -> np.ndarray:
    """Count-vector code (base l+1) of every index of ``(C^d)^{(x) l}``."""
    idx = np.arange(d**l)
    code = np.zeros(d**l, dtype=np.int64)
    for site in range(l):
        digit = (idx // d ** (l - 1 - site)) % d
        code += (l + 1) ** digit
    return code


def _encode(counts) -> int:
    l = sum(counts)
    return sum(c * (l + 1) ** a for a, c in enumerate(counts))


@dataclass(frozen=True, eq=False)
class TypicalSpec:
    """Typical projector of ``rho^{(x) l}`` as a mask over the product eigenbasis."""

    delta: float
    l: int
    base: np.ndarray
    basis: np.ndarray
    tset: TypicalSet
    mask: np.ndarray

    @property
    def rank(self) -> int:
        return int(self.mask.sum())

    def indices(self) -> Iterator[tuple]:
        return self.tset.sequences()

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of ``rho^{(x) l}`` in the product basis order."""
        out = np.ones(1)
        for _ in range(self.l):
            out = np.kron(out, self.base)
        return out

    def frame(self) -> np.ndarray:
        """Isometry whose columns are the retained product eigenvectors."""
        d = self.basis.shape[0]
        sel = np.flatnonzero(self.mask)
        if sel.size * d**self.l > C.DENSE_ENTRY_CAP:
            raise GuardError("typical frame too large")
        if sel.size == 0:
            return np.zeros((d**self.l, 0), dtype=complex)
        cols = np.ones((1, sel.size), dtype=complex)
        for site in range(self.l):
            digit = (sel // d ** (self.l - 1 - site)) % d
            cols = (cols[:, None, :] * self.basis[:, digit][None, :, :]).reshape(-1, sel.size)
        return cols

    def projector(self) -> np.ndarray:
        f = self.frame()
        return f @ dagger(f)

    def state(self) -> np.ndarray:
        """Normalized projector ``q / tr q``."""
        if self.rank == 0:
            raise ValueError("typical subspace is empty")
        return self.projector() / self.rank


@dataclass(frozen=True)
class ProjectorCertificate:
    mass: float
    mass_classical: float
    mass_bound: float
    c: float
    c_max: float
    entropy: float
    phi: float
    h: float
    eta: float
    dim: int
    sandwich_lo: float
    sandwich_hi: float
    hs2: float
    hs2_bound: float
    item1: bool
    item2: bool
    item3_upper: bool
    item3_lower: bool | None

    @property
    def holds(self) -> bool:
        return self.item1 and self.item2 and self.item3_upper and self.item3_lower is not False

    def to_dict(self) -> dict:
        return dict(self.__dict__, holds=self.holds)


def typical_projector(rho, l: int, delta: float, c: float = C.TYPICAL_C):
    """Frequency-typical projector of ``rho^{(x) l}`` and its certificate.

    The certificate records the measured mass, the retained eigenvalue range
    expressed as exponents ``-log2(lambda)/l``, ``tr q``, ``||q rho q||_2^2``
    and whether each of the three typicality inequalities holds.
    """
    rho = density(rho)
    d = rho.shape[0]
    _guard(l, d)
    if d**l > 2**22:
        raise GuardError("product basis too large for a dense mask")
    lam, basis = eigh_desc(rho)
    lam = np.clip(lam, 0.0, None)
    lam = lam / lam.sum()
    tset = typical_set(lam, l, delta)
    codes = _type_codes(l, d)
    mask = np.isin(codes, [_encode(t) for t in tset.types])
    spec = TypicalSpec(delta, l, lam, basis, tset, mask)

    eig = spec.eigenvalues()
    kept = eig[mask]
    mass = float(kept.sum())
    mass_classical = tset.mass
    s = float(-(lam[lam > 0] * np.log2(lam[lam > 0])).sum())
    ph = phi(delta, d)
    h = h_state(l, d)
    et = eta(l, delta, c, h)
    dim = spec.rank
    if dim:
        lo_exp = float(-np.log2(kept.max()) / l)
        hi_exp = float(-np.log2(kept.min()) / l)
    else:
        lo_exp = hi_exp = math.nan
    hs2 = float(np.sum(kept**2))
    item1 = mass >= (1.0 - 2.0 ** (-l * (c * delta**2 - h))) - _MARGIN
    item2 = dim == 0 or (hi_exp <= s + ph + _MARGIN and lo_exp >= s - ph - _MARGIN)
    upper = math.log2(dim) <= l * (s + ph) + _MARGIN if dim else True
    lower = None if et <= 0 else bool(dim >= et * 2.0 ** (l * (s - ph)) * (1 - _MARGIN))
    cert = ProjectorCertificate(
        mass=mass,
        mass_classical=mass_classical,
        mass_bound=1.0 - 2.0 ** (-l * (c * delta**2 - h)),
        c=c,
        c_max=largest_c(mass, l, delta, h),
        entropy=s,
        phi=ph,
        h=h,
        eta=et,
        dim=dim,
        sandwich_lo=lo_exp,
        sandwich_hi=hi_exp,
        hs2=hs2,
        hs2_bound=2.0 ** (-l * (s - 3 * ph)),
        item1=bool(item1),
        item2=bool(item2),
        item3_upper=bool(upper),
        item3_lower=lower,
    )
    return spec, cert


# ----------------------------------------------------------------------------
# typical Kraus words


@dataclass(frozen=True, eq=False)
class ReducedOperation:
    """CPTD map ``rho -> sum_{w in K} a_w rho a_w^dagger`` over typical Kraus words.

    ``base_kraus`` is the canonical single-letter Kraus family and ``weights``
    its distribution ``r``; words are produced on demand.
    """

    base_kraus: np.ndarray
    weights: np.ndarray
    tset: TypicalSet
    in_dim: int
    out_dim: int

    @property
    def l(self) -> int:
        return self.tset.l

    @property
    def n_words(self) -> int:
        return self.tset.size

    @property
    def mass(self) -> float:
        return self.tset.mass

    def words(self) -> Iterator[tuple]:
        return self.tset.sequences()

    def kraus_words(self, cap: int = C.KRAUS_WORD_CAP) -> np.ndarray:
        if self.n_words > cap:
            raise GuardError(f"{self.n_words} typical Kraus words exceed the cap {cap}")
        size = self.n_words * (self.out_dim**self.l) * (self.in_dim**self.l)
        if size > C.DENSE_ENTRY_CAP:
            raise GuardError("typical Kraus words too large to materialize")
        return np.array([word_operator(self.base_kraus, w) for w in self.words()])

    def as_channel(self, cap: int = C.KRAUS_WORD_CAP) -> KrausChannel:
        return KrausChannel(self.kraus_words(cap), trace_preserving=False, validate=False, name="reduced")

    def apply(self, rho) -> np.ndarray:
        """Sum over typical words, sharing work between words with a common prefix."""
        rho = np.asarray(rho, dtype=complex)
        l, n = self.l, len(self.weights)
        types = np.array(self.tset.types, dtype=int).reshape(-1, n)
        out = np.zeros((self.out_dim**l,) * 2, dtype=complex)
        if not len(types):
            return out

        def walk(site, counts, partial):
            nonlocal out
            if site == l:
                out += partial
                return
            for letter in range(n):
                counts[letter] += 1
                if np.any(np.all(types >= counts, axis=1)):
                    pre = self.out_dim**site
                    post = self.in_dim ** (l - site - 1)
                    nxt = conjugate_site(self.base_kraus[letter], partial, pre, post, partial.shape[1])
                    walk(site + 1, counts, nxt)
                counts[letter] -= 1

        walk(0, np.zeros(n, dtype=int), rho)
        return out


@dataclass(frozen=True)
class KrausCertificate:
    n_words: int
    mass: float
    mass_bound: float
    c_prime: float
    c_prime_max: float
    entropy_exchange: float
    gamma: float
    gamma_min: float
    h_prime: float
    item1: bool
    item2: bool

    @property
    def holds(self) -> bool:
        return self.item1 and self.item2

    def to_dict(self) -> dict:
        return dict(self.__dict__, holds=self.holds)


def typical_kraus(ch: KrausChannel, pi_g, l: int, delta: float, c_prime: float = C.TYPICAL_C_PRIME,
                  gamma: float | None = None):
    """Typical Kraus words of ``ch^{(x) l}`` relative to ``pi_g`` and the reduced operation."""
    canon = canonical_kraus(ch, pi_g)
    r = canon.weights / canon.weights.sum()
    n = len(r)
    _guard(l, n)
    tset = typical_set(r, l, delta)
    red = ReducedOperation(canon.channel.kraus, r, tset, ch.in_dim, ch.out_dim)
    se = float(-(r[r > 0] * np.log2(r[r > 0])).sum())
    g = gamma_default(delta, n) if gamma is None else gamma
    hp = h_kraus(l, ch.in_dim)
    nw = tset.size
    mass = tset.mass
    bound = 1.0 - 2.0 ** (-l * (c_prime * delta**2 - hp))
    cert = KrausCertificate(
        n_words=nw,
        mass=mass,
        mass_bound=bound,
        c_prime=c_prime,
        c_prime_max=largest_c(mass, l, delta, hp),
        entropy_exchange=se,
        gamma=g,
        gamma_min=(math.log2(nw) / l - se) if nw else -math.inf,
        h_prime=hp,
        item1=bool(mass >= bound - _MARGIN),
        item2=bool(nw == 0 or math.log2(nw) <= l * (se + g) + _MARGIN),
    )
    return red, cert
