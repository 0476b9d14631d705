"""Typical subspaces of a qubit source and of a phase-flip channel's Kraus words.

Run: python demos/01_typical_subspaces.py
"""

import numpy as np

from qcompound.channels import phase_flip
from qcompound.qmat import maximally_mixed
from qcompound.typicality import typical_kraus, typical_projector

rho = np.diag([0.9, 0.1])

# how much of rho^{(x)l} the typical projector keeps, and at what rank.
# The certified mass lower bound is vacuous at these lengths, so it is omitted.
print("source diag(.9,.1), delta=0.3")
for l in (4, 8, 12):
    proj, cert = typical_projector(rho, l, 0.3)
    print(f"  l={l:2d}  rank={cert.dim:5d} of {2**l:5d}  mass={cert.mass:.4f}")

# masses for the uniform source jump around with l: only some integer types
# fall strictly inside the delta ball
print("source I/2, delta=0.2")
for l in (4, 8, 12):
    _, cert = typical_projector(maximally_mixed(2), l, 0.2)
    print(f"  l={l:2d}  mass={cert.mass:.4f}")

# typical Kraus words of phase_flip(0.1)^{(x)10}: words with at most two Z's
_, cert = typical_kraus(phase_flip(0.1), maximally_mixed(2), 10, 0.3)
print(f"phase_flip(0.1), l=10: {cert.n_words} typical words carry mass {cert.mass:.4f}")
