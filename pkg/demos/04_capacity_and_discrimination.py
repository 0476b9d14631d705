"""Compound capacity lower bounds, then learning which channel is present.

Run: python demos/04_capacity_and_discrimination.py   (about half a minute)
"""

import numpy as np

from qcompound.channels import bit_flip, identity, phase_flip, useless
from qcompound.compound import bloch_scan, compound_capacity_lower, discriminate, fit_decay

# one channel: the optimizer finds pi and 1 - h(p)
est = compound_capacity_lower([phase_flip(0.1)])
print(f"phase_flip(0.1): {est.value:.6f}")

# two channels with different noise axes share a worse optimum
pair = [phase_flip(0.1), bit_flip(0.2)]
est = compound_capacity_lower(pair)
scan, _ = bloch_scan(pair, 0.02)
print(f"{{pf .1, bf .2}}: optimizer {est.value:.6f}, Bloch scan {scan:.6f}")

# a useless member kills everything
est = compound_capacity_lower([identity(2), useless(2)])
print(f"{{id, useless}}: {est.value:.6f}")

# discrimination with m uses of the unknown channel and a |+> probe
chans = [phase_flip(0.02), phase_flip(0.25)]
plus = np.array([1, 1]) / np.sqrt(2)
ms = list(range(1, 7))
worst = [discriminate(chans, m, probe=plus).worst for m in ms]
print("worst-member PGM success:", " ".join(f"{w:.3f}" for w in worst))
print(f"fitted decay of the failure probability: {fit_decay(ms, worst, len(chans)):.3f} per use")
