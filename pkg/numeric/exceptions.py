class EnergyLabError(ValueError):
    """Base class for every domain error raised by the workbench."""


class BackendMismatch(EnergyLabError):
    pass


class DivisionByZero(EnergyLabError, ZeroDivisionError):
    pass


class DomainError(EnergyLabError):
    pass


class ZeroElementError(EnergyLabError):
    pass


class ParameterError(EnergyLabError):
    pass


class SizeGuardExceeded(ParameterError):
    pass


class SideConditionViolation(EnergyLabError):
    pass


class InvariantViolation(EnergyLabError):
    """A proven guarantee failed at runtime; results after this point are void."""
