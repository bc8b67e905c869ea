"""Exception hierarchy shared by every module of the package."""


class GibbsFactorError(Exception):
    """Base class for all errors raised by gibbsfactor."""


class BadDimension(GibbsFactorError, ValueError):
    pass


class ZeroRowOrColumn(GibbsFactorError, ValueError):
    pass


class NotShiftCommuting(GibbsFactorError, ValueError):
    pass


class NotSurjective(GibbsFactorError, ValueError):
    pass


class EmptyFiber(GibbsFactorError, ValueError):
    pass


class SettingCViolation(GibbsFactorError, ValueError):
    """The factor system is not a 3-symbol to 2-symbol map of the supported shape."""


class DepthOverflow(GibbsFactorError, RuntimeError):
    """Word enumeration would exceed the configured table budget."""


class InsufficientDepth(GibbsFactorError, ValueError):
    pass


class ZeroMass(GibbsFactorError, ValueError):
    pass


class ZeroMatrix(GibbsFactorError, ValueError):
    pass


class CaseMismatch(GibbsFactorError, ValueError):
    pass


class UndefinedBranch(GibbsFactorError, ValueError):
    pass


class UndefinedAtPoint(GibbsFactorError, ValueError):
    """The potential has no value at the requested point (a limit does not exist)."""


class SupportMismatch(GibbsFactorError, ValueError):
    pass


class NotStochastic(GibbsFactorError, ValueError):
    pass


class NotIrreducible(GibbsFactorError, ValueError):
    pass


class ConfigError(GibbsFactorError, ValueError):
    """Malformed run configuration; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
