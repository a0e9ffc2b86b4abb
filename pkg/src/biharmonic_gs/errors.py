"""Exception hierarchy. Every error raised by the toolkit derives from ``ToolkitError``."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(ToolkitError, ValueError):
    """Invalid problem parameters."""


class DimensionTooSmall(ParameterError):
    pass


class LambdaOutOfRange(ParameterError):
    pass


class ExponentOutOfRange(ParameterError):
    pass


class GridTooCoarse(ToolkitError, ValueError):
    pass


class NonFiniteSample(ToolkitError, ValueError):
    pass


class ZeroDenominator(ToolkitError, ZeroDivisionError):
    pass


class NoConvergence(ToolkitError, RuntimeError):
    pass


class BoundaryLeak(ToolkitError, RuntimeError):
    pass


class ShiftOutOfRange(ToolkitError, ValueError):
    pass


class NotConverged(ToolkitError, ValueError):
    pass


class QuadratureFailure(ToolkitError, RuntimeError):
    pass


class SingularConfiguration(QuadratureFailure):
    pass
