"""Compound quantum channel coding numerics.

Channels are Kraus lists (:mod:`.channels`), entropic and fidelity quantities
live in :mod:`.information`, typical subspaces and reduced Kraus sets in
:mod:`.typicality`, random coding and its bounds in :mod:`.coding`, and the
family-level pipelines (nets, discrimination, code conversion, capacity
estimates) in :mod:`.compound`.
"""

__version__ = "0.1.0"

from .channels import (
    KrausChannel,
    amplitude_damping,
    apply,
    apply_power,
    bit_flip,
    builtin,
    complementary,
    depolarizing,
    diamond_distance,
    diamond_estimate,
    identity,
    mix,
    phase_flip,
    random_channel,
    tensor_power,
    useless,
)
from .errors import DimensionError, GuardError, HypothesisError, InvariantViolation
from .information import (
    coherent_information,
    composed_fidelity,
    entanglement_fidelity,
    entropy,
    optimize_code_recovery,
    optimize_recovery,
)
from .typicality import typical_kraus, typical_projector, typical_set
from .coding import (
    SubspaceFrame,
    decoupling_gap,
    extract_subcode,
    monte_carlo_fidelity,
    one_shot_bound,
    truncate_channel,
)
from .compound import (
    build_adapted_net,
    bsst_check,
    compound_capacity_lower,
    convert_code,
    discriminate,
    family,
)
