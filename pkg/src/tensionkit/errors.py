"""Exception hierarchy shared across the package."""


class TensionkitError(Exception):
    """Base class for all package errors."""


class ValidationError(TensionkitError, ValueError):
    """Input fails a structural or numerical invariant (not renormalized silently)."""


class AlphabetMismatchError(ValidationError):
    """Two objects that must share alphabets do not."""


class DimensionMismatchError(ValidationError):
    """Array shapes are inconsistent (e.g. channel rows vs. joint cells)."""


class BudgetExceededError(TensionkitError):
    """An exhaustive enumeration would exceed the configured budget."""


class RefusalError(TensionkitError):
    """A request whose answer could not be made sound (e.g. a rate bound
    without certified target evidence) is refused rather than answered."""
