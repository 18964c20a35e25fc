"""Exception types raised across the package."""


class LPPError(Exception):
    """Base class for all package errors."""


class ParameterError(LPPError, ValueError):
    """Invalid distribution or model parameters."""


class CapacityError(LPPError, MemoryError):
    """Requested array would exceed the memory budget."""


class MissingMomentsError(LPPError, ValueError):
    pass


class DomainError(LPPError, ValueError):
    """A point, rectangle or argument lies outside the admissible domain."""


class OrderingError(DomainError):
    pass


class InsufficientMarginError(DomainError):
    pass


class UnsupportedDistributionError(LPPError, ValueError):
    """Operation needs an exactly solvable (exponential/geometric) law."""


class ConfigurationError(LPPError, ValueError):
    pass


class StabilityError(LPPError, ValueError):
    """Queueing input with mean inter-arrival time not exceeding the service mean."""


class CouplingError(LPPError, ValueError):
    pass


class DataError(LPPError, ValueError):
    pass
