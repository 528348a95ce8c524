"""Exception hierarchy shared by every module of the package."""


class MinkowskiError(Exception):
    """Base class for all errors raised by :mod:`minkcurv`."""


# norm model
class ZeroVector(MinkowskiError, ValueError):
    pass


class NotUnit(MinkowskiError, ValueError):
    pass


class DegeneratePlane(MinkowskiError, ValueError):
    pass


class NoConvergence(MinkowskiError, ArithmeticError):
    def __init__(self, msg, v=None):
        super().__init__(msg)
        self.v = v


class SingularSystem(MinkowskiError, ArithmeticError):
    def __init__(self, msg, v=None):
        super().__init__(msg)
        self.v = v


class InadmissibleNorm(MinkowskiError):
    """The sampled spectrum of ``du`` shows the norm is not (numerically) admissible."""

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


# planar curves
class InsufficientSamples(MinkowskiError, ValueError):
    pass


class CollinearSamples(MinkowskiError, ValueError):
    pass


class OrientationAmbiguity(MinkowskiError, ArithmeticError):
    pass


# charts and curvature
class OutOfDomain(MinkowskiError, ValueError):
    pass


class DegenerateChart(MinkowskiError, ArithmeticError):
    pass


class StepUnderflow(MinkowskiError, ValueError):
    pass


class NearTangentNormal(MinkowskiError, ArithmeticError):
    pass


class DefectiveDifferential(MinkowskiError, ArithmeticError):
    pass


class AsymptoticInput(MinkowskiError, ValueError):
    pass


class OpenSurface(MinkowskiError, ValueError):
    pass


# sections and flow lines
class TraceStall(MinkowskiError, ArithmeticError):
    pass


class PlaneDegenerate(MinkowskiError, ValueError):
    pass


class UmbilicStart(MinkowskiError, ValueError):
    pass


class UmbilicPoint(MinkowskiError, ValueError):
    pass


class DefiniteRegion(MinkowskiError, ValueError):
    pass


# configuration
class ConfigError(MinkowskiError):
    pass


class ParseError(ConfigError):
    def __init__(self, msg, line=None):
        super().__init__(msg if line is None else f"line {line}: {msg}")
        self.line = line


class ValidationError(ConfigError):
    def __init__(self, field, msg=""):
        super().__init__(f"{field}: {msg}" if msg else field)
        self.field = field
