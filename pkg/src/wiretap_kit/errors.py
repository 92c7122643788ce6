"""Exception hierarchy shared by every module."""


class WiretapKitError(Exception):
    """Base class for all toolkit errors."""


class ShapeMismatch(WiretapKitError, ValueError):
    pass


class DimensionMismatch(ShapeMismatch):
    pass


class DomainError(WiretapKitError, ValueError):
    pass


class OutOfRange(DomainError):
    pass


class PreconditionViolated(DomainError):
    pass


class NoSolution(WiretapKitError):
    """The affine system ``Mx = y`` is inconsistent."""


class EnumerationCapExceeded(WiretapKitError):
    def __init__(self, size, cap):
        super().__init__(f"enumeration of {size} entries exceeds cap {cap}")
        self.size = size
        self.cap = cap


class ZeroProbabilityEvent(WiretapKitError):
    pass


class NotAPartition(WiretapKitError, ValueError):
    pass


class BoundViolation(WiretapKitError, AssertionError):
    """A bound that must hold mathematically was observed to fail."""


class NoConvergence(WiretapKitError):
    pass


class UnsupportedFamily(WiretapKitError, ValueError):
    pass


class TooManyErrors(WiretapKitError):
    pass


class RankDeficientAfterRetries(WiretapKitError):
    pass


class SingularTransfer(WiretapKitError):
    pass


class UnreachableReceiver(WiretapKitError):
    pass


class BadHeader(WiretapKitError, ValueError):
    pass
