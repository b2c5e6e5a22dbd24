"""Exception types shared across the package."""


class DataError(Exception):
    """Input data violates a hard contract (bad CSV, broken bundle, unknown id)."""


class UsageError(Exception):
    """Caller asked for something structurally invalid (bad parameters)."""
