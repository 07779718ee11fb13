"""Exception hierarchy shared by every module of the package."""


class HybridSqueezeError(Exception):
    """Base class for all package errors."""


class DimensionError(HybridSqueezeError, ValueError):
    pass


class LayoutError(HybridSqueezeError, ValueError):
    pass


class NumericError(HybridSqueezeError, ArithmeticError):
    pass


class DomainError(HybridSqueezeError, ValueError):
    """A physical input lies outside the domain of a formula."""


class InstabilityError(DomainError):
    """Parametric drive beyond threshold (|Omega_p| >= |Delta_x|)."""


class DegenerateError(DomainError):
    """A vanishing denominator (resonant detuning, zero squeezing)."""


class PreconditionError(HybridSqueezeError, ValueError):
    pass


class BathError(HybridSqueezeError, ValueError):
    """Unphysical reservoir coefficients."""


class IntegrationError(HybridSqueezeError, RuntimeError):
    pass


class StepUnderflowError(IntegrationError):
    pass


class MaxStepsError(IntegrationError):
    pass


class TraceDriftError(IntegrationError):
    pass


class ConfigError(HybridSqueezeError, ValueError):
    """Invalid scenario configuration; ``path`` names the offending field."""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ConvergenceError(HybridSqueezeError, RuntimeError):
    pass
