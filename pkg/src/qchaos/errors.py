"""Exception hierarchy shared by the library and the command line."""


class QChaosError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(QChaosError, ValueError):
    pass


class DegenerateDenominatorError(QChaosError, ZeroDivisionError):
    pass


class AccuracyError(QChaosError):
    """Raised when a numerical quadrature cannot reach the requested tolerance."""


class LineRangeError(QChaosError, IndexError):
    """An index on a resonance line maps outside 0 < n1 < n2."""


class SolverError(QChaosError):
    pass


class StallError(QChaosError):
    """Event-driven propagation cannot advance (both particles at rest)."""


class BandError(QChaosError):
    """An energy band holds too few levels for spacing statistics."""


class CacheError(QChaosError):
    pass
