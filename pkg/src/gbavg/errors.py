"""Shared exception types."""


class CapacityError(RuntimeError):
    """A requested computation exceeds the configured memory/size budget."""


class DegenerateWindowError(ValueError):
    """All short-interval window sums vanish; a ratio would be 0/0."""
