"""Exception hierarchy shared by all specdet modules."""


class SpecDetError(Exception):
    """Base class for hard numerical or configuration failures."""


class InvalidPotential(SpecDetError, ValueError):
    pass


class NonIntegrable(SpecDetError):
    pass


class MomentCondition(SpecDetError):
    pass


class TailNotConverged(SpecDetError):
    pass


class InvalidInteraction(SpecDetError, ValueError):
    pass


class SingularPreset(InvalidInteraction):
    pass


class UnclassifiablePole(SpecDetError):
    pass


class ResonantDivision(SpecDetError, ZeroDivisionError):
    """A Jost function (or L) vanishes where a quotient formula needs it."""


class AtUnperturbedPole(SpecDetError, ZeroDivisionError):
    pass


class NearSingularLog(SpecDetError):
    pass


class GridTooCoarse(SpecDetError):
    pass


class UnwrapAmbiguous(SpecDetError):
    pass


class ContourTooClose(SpecDetError):
    pass


class ResonanceBoundary(SpecDetError):
    """A Levinson classifier quantity sits in the indeterminate band."""


class StencilInconsistent(SpecDetError):
    pass


class ConfigError(SpecDetError):
    def __init__(self, message, *, field=None, line=None):
        where = []
        if field is not None:
            where.append(f"field {field}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.field = field
        self.line = line


class ExponentMismatch(UserWarning):
    """Empirical low-energy exponent disagrees with the predicted integer."""
