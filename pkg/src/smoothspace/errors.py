from __future__ import annotations


class SmoothspaceError(Exception):
    """Base class for every error raised by smoothspace."""


class DegenerateOperator(SmoothspaceError, ValueError):
    pass


class NotUnimodular(SmoothspaceError, ValueError):
    pass


class EmptyCollection(SmoothspaceError, ValueError):
    pass


class AboveLine(SmoothspaceError, ValueError):
    pass


class AboveDiagram(SmoothspaceError, ValueError):
    pass


class NotHomogeneous(SmoothspaceError, ValueError):
    pass


class NotProper(SmoothspaceError, ValueError):
    pass


class NotSubordinate(SmoothspaceError, ValueError):
    pass


class DenominatorVanishes(SmoothspaceError, ValueError):
    pass


class NoIndices(SmoothspaceError, ValueError):
    pass


class RealArgument(SmoothspaceError, ValueError):
    pass


class NotCompactlySupported(SmoothspaceError, ValueError):
    pass


class ConfigError(SmoothspaceError, ValueError):
    pass


class ParseError(SmoothspaceError, ValueError):
    def __init__(self, message: str, position: int | None = None) -> None:
        self.message = message
        self.position = position
        if position is None:
            super().__init__(message)
        else:
            super().__init__(f"{message} at position {position}")


class InternalInconsistency(SmoothspaceError, RuntimeError):
    pass


class ResidualTooLarge(SmoothspaceError, RuntimeError):
    pass


class FinalEquationViolated(SmoothspaceError, RuntimeError):
    pass


class NeedLargerC(SmoothspaceError, RuntimeError):
    pass


class QuadratureFailure(SmoothspaceError, RuntimeError):
    pass
