"""Exception types raised by the toolkit."""


class MagfimError(Exception):
    """Base class for all package-specific errors."""


class DenseCapExceededError(MagfimError):
    """A dense statevector operation was requested above the qubit cap."""


class RankDeficiencyError(MagfimError):
    """A Fisher matrix is singular where an inverse is required."""

    def __init__(self, message, null_directions=None):
        super().__init__(message)
        self.null_directions = tuple(null_directions or ())


class AttainabilityError(MagfimError):
    """SLD commutator expectations do not vanish, so no saturating
    projective measurement exists for this probe."""


class LinearDependenceError(MagfimError):
    """The candidate measurement vectors are linearly dependent."""


class PovmValidityError(MagfimError):
    """A candidate measurement is not a valid POVM (negative element or
    broken completeness)."""


class MarginalMismatchError(MagfimError):
    """One- and two-site marginals passed together are inconsistent."""


class ConfigError(MagfimError):
    """Invalid scan configuration."""
