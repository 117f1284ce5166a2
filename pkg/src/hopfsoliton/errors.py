"""Exception hierarchy for the toolkit."""


class HopfSolitonError(Exception):
    """Base class for all errors raised by this package."""


class NotOnSphere(HopfSolitonError, ValueError):
    pass


class ResolutionTooLow(HopfSolitonError, ValueError):
    pass


class CurvesIntersect(HopfSolitonError, ValueError):
    pass


class PoleOnCurve(HopfSolitonError, ValueError):
    pass


class OriginSingular(HopfSolitonError, ValueError):
    """A field built from m^a was requested too close to r = 0."""


class CutoffExceedsMesh(HopfSolitonError, ValueError):
    pass


class BoundaryNotAsymptotic(HopfSolitonError, ValueError):
    pass


class MeshMismatch(HopfSolitonError, ValueError):
    pass


class WindowTooNarrow(HopfSolitonError, ValueError):
    pass


class SingularJacobian(HopfSolitonError, ArithmeticError):
    pass


class ProfileFormatError(HopfSolitonError, ValueError):
    pass


class NonConvergence(HopfSolitonError, RuntimeError):
    """Newton iteration stopped before reaching tolerance.

    The best iterate is kept on ``report`` so diagnostics stay inspectable.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
