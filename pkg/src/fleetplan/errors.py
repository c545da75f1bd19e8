"""Exception types shared across the package."""


class FleetplanError(Exception):
    """Base class for package errors."""


class MalformedProblem(FleetplanError):
    """LP data is dimensionally inconsistent or has lo > hi bounds."""


class SolverFailure(FleetplanError):
    """The LP solver could not produce a usable solution."""


class ParseError(FleetplanError):
    """Instance document could not be parsed."""


class ValidationError(FleetplanError):
    """Instance data violates a named invariant."""


class OutOfHorizon(FleetplanError):
    """Strategic step outside [0, T]."""


class InfeasibleAction(FleetplanError):
    """Hiring action violates the action-space rules for the state."""


class MissingSolution(FleetplanError):
    """Matching-sensitive resignation requested without an operational solution."""


class StateSpaceTooLarge(FleetplanError):
    """Enumeration would exceed the configured state/support limit."""


class Unreachable(FleetplanError):
    """No fleet size within the search cap achieves full service."""


class EmptyRange(FleetplanError):
    """Integer search range is empty (lo > hi)."""


class FileFormatError(FleetplanError):
    """Persisted table file has an unknown or mismatched version."""
