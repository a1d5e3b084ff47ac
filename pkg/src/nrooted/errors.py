"""Exception types shared across the package."""


class ConsistencyError(RuntimeError):
    """Two supposedly-equivalent computation routes disagreed.

    Raised whenever an internal cross-check fails: mismatching series routes,
    a coefficient that should be a non-negative integer but is not, negative
    powers that should cancel but do not, a count that should be divisible by
    (2e)! but is not.  This is always a bug indicator, never a user error, and
    is therefore never silently swallowed.
    """


class BoundExceededError(ValueError):
    """An exhaustive enumeration was requested beyond its size guardrail."""
