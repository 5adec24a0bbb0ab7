"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates an operation's mathematical domain."""


class DivergentSeriesError(DomainError):
    """The requested weighted series diverges (threshold at or above critical)."""
