"""Covering a one-parameter family by a finite net, and what the net costs.

Run: python demos/03_compound_nets.py
"""

import numpy as np

from qcompound.compound import (
    build_adapted_net,
    family,
    family_min_coherent_information,
    min_coherent_information,
    min_output_eigenvalue,
)
from qcompound.qmat import maximally_mixed

fam = family("phase_flip", 0.0, 0.2)
rho = np.diag([0.6, 0.4])

for tau in (0.05, 0.02):
    net = build_adapted_net(fam, tau)
    worst_eig = min(min_output_eigenvalue(m) for m in net.members)
    print(f"tau={tau}: {len(net.members)} members, min output eigenvalue {worst_eig:.4f} "
          f"(target {tau / 4:.4f})")
    # mixing with the useless channel costs a little coherent information
    print(f"  inf I_c over family {family_min_coherent_information(rho, fam):.4f}, "
          f"over net {min_coherent_information(rho, net.members):.4f}")

print(f"at pi: {family_min_coherent_information(maximally_mixed(2), fam):.4f} (= 1 - h(0.2))")
