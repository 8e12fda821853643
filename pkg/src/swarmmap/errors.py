"""Exception types shared across the package."""


class SwarmMapError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SwarmMapError):
    """Input data violates a structural invariant (shape, finiteness, symmetry...)."""


class ParseError(SwarmMapError):
    """A file could not be parsed; the message names the offending location."""
