"""Numerical tolerances and size guards shared by every module.

Everything that decides "close enough" or "too big" lives here so a whole run
can be tightened or relaxed from one place.
"""

import math

HERMITIAN_TOL = 1e-10
PSD_CLAMP_TOL = 1e-10
TRACE_TOL = 1e-10
PURE_NORM_TOL = 1e-12
UNITARY_TOL = 1e-10
KRAUS_TP_TOL = 1e-9
CHOI_PSD_TOL = 1e-9

ROUTE_AGREE_FE = 1e-10
ROUTE_AGREE_IC = 1e-8
ROUTE_AGREE_SE = 1e-8
ROUTE_AGREE_HS = 1e-9

PINV_CUTOFF = 1e-12

# Kraus words materialized by tensor_power before refusing.
KRAUS_WORD_CAP = 4096
# Largest dense operator (rows * cols * count) we are willing to build.
DENSE_ENTRY_CAP = 2**25
# Joint dimension up to which the purification route is evaluated.
PURIFICATION_ROUTE_CAP = 4096

TYPICAL_MAX_L = 20
TYPICAL_MAX_ALPHABET = 4

# Default constants for the typicality mass bounds; c = c' = 1/(2 ln 2).
TYPICAL_C = 1.0 / (2.0 * math.log(2.0))
TYPICAL_C_PRIME = 1.0 / (2.0 * math.log(2.0))
