"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument lies outside the range an operation is defined for."""


class SizeError(ValueError):
    """An enumeration or extension would exceed the configured budget."""
