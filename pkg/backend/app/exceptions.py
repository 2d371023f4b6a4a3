"""
Error taxonomy shared by the library and the CLI.
The CLI maps these onto exit codes; library code only raises.
"""


class SteeringError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(SteeringError, ValueError):
    """Dimension or partition mismatch."""


class DomainError(SteeringError, ValueError):
    """Input outside the mathematical domain of an operation."""


class UnphysicalStateError(DomainError):
    """A covariance matrix fails the bona fide condition where physicality is required."""


class IllConditionedError(SteeringError, ArithmeticError):
    """A block that must be inverted or factorized is numerically singular."""


class InconsistentInvariantsError(SteeringError, ValueError):
    """Local symplectic invariants admit no real standard form."""


class PreconditionError(SteeringError, ValueError):
    pass


class DegenerateDataError(SteeringError, ValueError):
    pass


class ConfigError(SteeringError, ValueError):
    pass


class CMParseError(SteeringError, ValueError):
    pass


class SymplecticAccuracyWarning(RuntimeWarning):
    """Paired symplectic eigenvalue moduli disagree beyond tolerance."""
