"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line interface:
2 for configuration problems, 3 for data problems and 4 for numerical
failures.
"""


class IHRError(Exception):
    exit_code = 4


# configuration / input validation -------------------------------------------

class ConfigError(IHRError):
    exit_code = 2


class InvalidConfig(ConfigError):
    pass


class InvalidSpec(ConfigError):
    pass


class DimensionTooLarge(ConfigError):
    pass


class DimensionMismatch(ConfigError):
    pass


class InvalidK(ConfigError):
    pass


# data problems -----------------------------------------------------------------

class DataError(IHRError):
    exit_code = 3


class ParseError(DataError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegenerateColumn(DataError):
    pass


class InsufficientData(DataError):
    pass


class EmptySubsample(DataError):
    pass


class NoTailDependence(DataError):
    def __init__(self, i, j):
        super().__init__(f"no joint tail observations for pair ({i + 1}, {j + 1})")
        self.pair = (i, j)


# numerical / model-level failures ---------------------------------------------

class NumericalError(IHRError):
    exit_code = 4


class InvalidVariogram(NumericalError):
    pass


class InvalidPrecision(NumericalError):
    pass


class DomainError(NumericalError):
    pass


class RequiresProjection(NumericalError):
    pass


class DisconnectedGraph(NumericalError):
    pass


class CompletionFailed(NumericalError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class InvalidWeights(NumericalError):
    pass


class OptimizationDiverged(NumericalError):
    pass


class GenerationFailed(NumericalError):
    pass
