"""Exception types.  The runner maps them to exit codes."""


class DimensionError(ValueError):
    """Operand shapes do not fit together."""


class GuardError(RuntimeError):
    """A size guard (Kraus word cap, block length, alphabet) was exceeded."""


class HypothesisError(ValueError):
    """Inputs violate the hypotheses of the statement being checked."""


class InvariantViolation(AssertionError):
    """Two independent evaluation routes disagree, or a checked bound fails."""
