"""Exception types shared across the package."""


class HermscaleError(Exception):
    """Base class for package-specific failures."""


class AccuracyError(HermscaleError):
    """An adaptive numerical routine could not reach the requested tolerance.

    Carries the achieved error estimate so callers can decide whether the
    partial result is still usable.
    """

    def __init__(self, message, achieved=None, value=None):
        if achieved is not None:
            message = f"{message} (achieved error estimate {achieved:.3e})"
        super().__init__(message)
        self.achieved = achieved
        self.value = value


class BracketError(HermscaleError):
    """A root bracket does not contain a sign change."""

    def __init__(self, message, f_lo=None, f_hi=None):
        if f_lo is not None and f_hi is not None:
            message = f"{message} (endpoint values {f_lo:.6e}, {f_hi:.6e})"
        super().__init__(message)
        self.f_lo = f_lo
        self.f_hi = f_hi


class DegenerateBalanceError(BracketError):
    """The balance function vanishes identically on the bracket."""
