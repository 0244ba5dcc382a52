"""Exception hierarchy.

Every error carries a module-qualified ``code`` (``"series.PoleAtOrigin"``)
so the command-line runner can report failures without string matching.
"""


class VellingLabError(Exception):
    module = "velling_lab"

    @property
    def code(self) -> str:
        return f"{self.module}.{type(self).__name__}"


# series
class SeriesError(VellingLabError):
    module = "series"


class DivisionByZeroConstantTerm(SeriesError, ZeroDivisionError):
    pass


class InnerConstantTermNonzero(SeriesError, ValueError):
    pass


class LogOfNonUnitConstantTerm(SeriesError, ValueError):
    pass


class VanishingFirstDerivative(SeriesError, ZeroDivisionError):
    pass


class PoleAtOrigin(SeriesError, ZeroDivisionError):
    pass


# schwarzian
class DenominatorVanishesOnGrid(VellingLabError, ArithmeticError):
    module = "schwarzian"


# diskquad
class QuadratureError(VellingLabError):
    module = "diskquad"


class InvalidGridShape(QuadratureError, ValueError):
    pass


class MomentListTooShort(QuadratureError, ValueError):
    pass


class BoundaryRadiusNotStrictlyInside(QuadratureError, ValueError):
    pass


class NonConvergentSequence(QuadratureError, ArithmeticError):
    pass


# metrics
class PerturbationTooLarge(VellingLabError, ValueError):
    module = "metrics"


# transport
class TransportError(VellingLabError):
    module = "transport"


class BasePointOutsideDisk(TransportError, ValueError):
    pass


class IndexOutOfRange(TransportError, IndexError):
    pass


# cli
class RunnerError(VellingLabError):
    module = "cli"


class ConfigInvalid(RunnerError, ValueError):
    pass


class ExperimentUnknown(RunnerError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class IoFailure(RunnerError, OSError):
    pass
