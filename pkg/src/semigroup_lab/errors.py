"""Exception hierarchy shared by every module of the lab."""


class LabError(Exception):
    """Base class for all errors raised by :mod:`semigroup_lab`."""


class InvalidRadiusError(LabError, ValueError):
    pass


class UnknownGeneratorError(LabError, ValueError):
    """A word uses a symbol outside ``1..p``."""


class UnsupportedGeneratorError(LabError, TypeError):
    """An operation needs a generator family it does not get (e.g. exact preimages of a logistic map)."""


class SingularDerivativeError(LabError, ArithmeticError):
    pass


class NoFiniteFixError(LabError, ValueError):
    """Fixed points requested for a word containing a rotation."""


class EstimateUndefinedError(LabError, ArithmeticError):
    """Every Monte Carlo sample was censored."""


class ConfigError(LabError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending entry."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class CapabilityError(LabError):
    """The experiment cannot run with the requested generators."""
