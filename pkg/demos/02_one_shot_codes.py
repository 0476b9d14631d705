"""Random subspace codes for a pair of channels: the one-shot bound vs Monte Carlo.

Run: python demos/02_one_shot_codes.py   (about a minute)
"""

from qcompound.channels import identity, phase_flip
from qcompound.coding import monte_carlo_fidelity, one_shot_bound, truncate_channel
from qcompound.qmat import maximally_mixed

# noiseless pair: the bound is pure dimension counting and every draw is perfect
twins = [identity(1024), identity(1024)]
b = one_shot_bound(twins, 2, maximally_mixed(1024))
mc = monte_carlo_fidelity(twins, 2, 10, seed=5)
print(f"identity pair, k=2: bound {b.bound:.4f}, mean F_e {mc.mean:.4f}")

# weak dephasing restricted to typical words. The bound goes negative at this size
# while codes actually do reasonably well.
chans = [truncate_channel(phase_flip(0.01), maximally_mixed(2), 8, 0.4) for _ in range(2)]
b = one_shot_bound(chans, 2, maximally_mixed(256))
mc = monte_carlo_fidelity(chans, 2, 100, seed=11)
print(f"truncated phase-flip pair, l=8, k=2: bound {b.bound:.4f}, mean F_e {mc.mean:.4f} +- {mc.stderr:.4f}")
