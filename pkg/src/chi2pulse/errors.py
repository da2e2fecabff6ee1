"""Exception and warning types shared across the package."""


class Chi2PulseError(Exception):
    """Base class for all package errors."""


class GridMismatchError(Chi2PulseError, ValueError):
    """Two mode functions live on different frequency grids."""


class ParameterError(Chi2PulseError, ValueError):
    """A physical or numerical parameter is out of its allowed range."""


class RankDeficiencyError(Chi2PulseError, ValueError):
    """A Gram-Schmidt seed mode is numerically dependent on its predecessors."""

    def __init__(self, index, residual):
        self.index = index
        self.residual = residual
        super().__init__(
            f"seed mode {index} is linearly dependent on the previous modes "
            f"(relative residual norm {residual:.3e})"
        )


class DispersionRangeError(Chi2PulseError, ValueError):
    """A refractive index was requested outside the model's validity window."""


class CoverageError(Chi2PulseError, ValueError):
    """The frequency grid does not cover a required spectral region."""


class DegenerateRegimeError(Chi2PulseError, ArithmeticError):
    """theta_K and theta_J coincide, so the first-order map has no regime."""


class DegeneracyError(Chi2PulseError, ArithmeticError):
    """A matrix that must be nonsingular is numerically singular."""

    def __init__(self, message, direction=None):
        self.direction = direction
        super().__init__(message)


class ShapeError(Chi2PulseError, ValueError):
    """A matrix has the wrong shape for the requested operation."""


class ContractError(Chi2PulseError, ValueError):
    """An input violates a documented precondition."""


class UnphysicalStateError(Chi2PulseError, ValueError):
    """A covariance matrix violates the uncertainty principle."""


class WindowError(Chi2PulseError, ValueError):
    """A phase-space window is too small for the function sampled on it."""


class ConfigError(Chi2PulseError, ValueError):
    """A configuration file failed validation.

    ``problems`` holds one human-readable entry per offending key.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


class TruncationWarning(UserWarning):
    """A spectral profile is cut off by the edge of the frequency grid."""
