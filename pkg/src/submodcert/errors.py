"""Exception types shared across the package."""


class SetFunctionError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(SetFunctionError, ValueError):
    """An argument violates an operation's precondition (bad mask, bad
    element index, sets not nested, coordinate out of range, ...)."""


class CapacityError(SetFunctionError, ValueError):
    """The ground set is larger than the operation's hard cap.  The
    message always names the cap so callers can report it."""


class InfeasibleConfigurationError(SetFunctionError, ValueError):
    """A constructive witness was requested for a configuration in which
    no witness of that shape exists (for example an empty or full truth
    mask)."""
