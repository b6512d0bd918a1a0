"""Exception types raised by the package."""


class StieltjesError(Exception):
    """Base class for all domain errors."""


class PoleProximityError(StieltjesError, ValueError):
    """Evaluation point too close to a pole (or a singular inner level)."""


class NotClassGError(StieltjesError, ValueError):
    """Input does not pass class-G certification."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class RealAxisPointError(StieltjesError, ValueError):
    """A kernel certificate was requested at a real point."""


class TranslationViolationError(StieltjesError, ValueError):
    """Translation would leave the class (B1 + f(0) not PSD, or A1 not PSD)."""


class NullFunctionError(StieltjesError, ValueError):
    """Pseudo-inversion of an identically zero negative part."""


class ComplexZeroError(StieltjesError, ArithmeticError):
    """A computed zero left the open negative real semi-axis."""


class DegreeZeroError(StieltjesError, ValueError):
    """Reduction requested on a function without finite poles."""


class NonDecreasingDegreeError(StieltjesError, ArithmeticError):
    """A reduction step failed to lower the partial McMillan degree."""


class NotScalarError(StieltjesError, ValueError):
    """A scalar-only operation received a matrix-valued function."""


class NonPositiveCoefficientError(StieltjesError, ValueError):
    """Continued-fraction coefficient that must be positive is not."""


class NotMeasureTransformError(StieltjesError, ValueError):
    """Function carries a constant (or linear) part beyond a measure transform."""


class DegenerateDenominatorError(PoleProximityError):
    """Effective-medium formula hit a vanishing denominator."""


class SingularCoreError(StieltjesError, ValueError):
    """sigma2*I - core tensor is singular in Tartar's formula."""


class BadM1Error(StieltjesError, ValueError):
    """Lamination matrix is not real symmetric PSD with unit trace."""


class ZeroPhaseError(StieltjesError, ZeroDivisionError):
    """Harmonic average divides by a vanishing phase with nonzero weight."""


class ZeroDenominatorError(StieltjesError, ZeroDivisionError):
    """Perpendicular laminate conductivity has a vanishing denominator."""


class NotRealizableError(StieltjesError, ValueError):
    """Function cannot be realized as a multicoated assemblage."""


class NotNormalized(UserWarning):
    """Synthesized laminate weights do not sum to one (f(1) != 1)."""


class DocumentError(StieltjesError, ValueError):
    """Malformed input document; ``path`` locates the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
