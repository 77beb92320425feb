"""Exception types shared across the package."""


class FreeOrthError(Exception):
    pass


class ShapeError(FreeOrthError, ValueError):
    """Operands have incompatible leg counts or vector lengths."""


class ResourceError(FreeOrthError):
    """A requested dense object exceeds the configured memory cap."""


class DegeneracyError(FreeOrthError):
    """A numerical eigen-gap or norm check failed.

    ``k`` and ``r`` identify the offending level when known.
    """

    def __init__(self, message, k=None, r=None):
        super().__init__(message)
        self.k = k
        self.r = r
