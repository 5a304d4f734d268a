"""Exception types raised across the package."""


class QRGError(Exception):
    """Base class for every error raised by qrg_coherence."""


class NonHermitian(QRGError, ValueError):
    pass


class NoConvergence(QRGError, ArithmeticError):
    pass


class InvalidState(QRGError, ValueError):
    pass


class BadSubsystem(QRGError, ValueError):
    pass


class DimensionMismatch(QRGError, ValueError):
    pass


class BadPartition(QRGError, ValueError):
    pass


class TradeoffViolation(QRGError, ArithmeticError):
    """total > local + collective; only reachable through an implementation bug."""


class InvalidParam(QRGError, ValueError):
    pass


class NoSignChange(QRGError, ValueError):
    pass


class FlowSaturated(QRGError, ArithmeticError):
    """A coupling along the flow hit a freeze flag, so the chain rule is undefined."""
