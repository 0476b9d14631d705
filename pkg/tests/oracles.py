"""Independent reference computations used only by the tests."""

import math

import cvxpy as cp
import numpy as np
from scipy.stats import binom

from qcompound.channels import choi


def diamond_sdp(ch1, ch2) -> float:
    """Diamond distance of two channels from the semidefinite program over ``W <= rho (x) 1``."""
    j = choi(ch1) - choi(ch2)
    d, do = ch1.in_dim, ch1.out_dim
    w = cp.Variable((d * do, d * do), hermitian=True)
    rho = cp.Variable((d, d), hermitian=True)
    cons = [w >> 0, rho >> 0, cp.real(cp.trace(rho)) == 1, cp.kron(rho, np.eye(do)) - w >> 0]
    prob = cp.Problem(cp.Maximize(cp.real(cp.trace(j @ w))), cons)
    prob.solve(solver=cp.CLARABEL)
    return 2 * float(prob.value)


def binary_entropy(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def binomial_mass(n: int, p: float, ks) -> float:
    return float(sum(binom.pmf(k, n, p) for k in ks))


def helstrom(rho, sigma) -> float:
    """Optimal equal-prior success probability for two states."""
    return 0.5 + 0.25 * float(np.abs(np.linalg.eigvalsh(rho - sigma)).sum())


def optimal_recovery_sdp(rho, ch) -> float:
    """Largest ``F_e(rho, R o ch)`` over channels ``R``, as a semidefinite program in the Choi matrix of ``R``."""
    from qcompound.channels import apply_local
    from qcompound.qmat import purify

    d, do = ch.in_dim, ch.out_dim
    psi = purify(rho).vec
    big_psi = np.outer(psi, psi.conj())
    sigma = apply_local(ch, big_psi, [d, d], 1)  # ref (x) K
    s4 = sigma.reshape(d, do, d, do)
    p4 = big_psi.reshape(d, d, d, d)
    # F = sum_xy tr(J_xy M_xy) with M_xy[c, e] = sum_ab psi[(a,c),(b,e)] sigma_xy[b, a]
    m = np.einsum("acbe,bxay->xyce", p4, s4)
    big_m = np.zeros((do * d, do * d), dtype=complex)
    for x in range(do):
        for y in range(do):
            big_m[y * d:(y + 1) * d, x * d:(x + 1) * d] = m[x, y]
    j = cp.Variable((do * d, do * d), hermitian=True)
    tr_out = cp.partial_trace(j, [do, d], axis=1)
    prob = cp.Problem(cp.Maximize(cp.real(cp.trace(j @ big_m))), [j >> 0, tr_out == np.eye(do)])
    prob.solve(solver=cp.CLARABEL)
    return float(prob.value)
