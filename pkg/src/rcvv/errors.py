"""Exception hierarchy shared across the package."""


class RcvvError(ValueError):
    """Base class for all library errors."""


class BackendMismatchError(RcvvError):
    """Two operands carry different coefficient backends."""


class OffsetMismatchError(RcvvError):
    """Series offsets (fractional exponents) are incompatible."""


class PoleDegeneracyError(RcvvError):
    """A rising gamma-ratio product hits a zero factor."""


class MetaMismatchError(RcvvError):
    """Form metadata (weights, dimensions, offsets, tensor structure) disagrees."""


class PrecisionError(RcvvError):
    """A coefficient beyond the trusted truncation bound was requested."""


class SupportError(RcvvError):
    """A coefficient violates the discriminant-sign support condition."""


class InternalConsistencyError(RcvvError):
    """An eagerly checked structural guarantee failed; indicates a bug."""
