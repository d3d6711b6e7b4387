"""Exception types shared across the package."""


class CvxlabError(Exception):
    """Base class for all package errors."""


class ContractViolation(CvxlabError):
    """An input broke a documented precondition (shape, dtype, range)."""


class EvaluationError(CvxlabError):
    """A scalar field produced NaN or +inf at a probed point.

    Carries the offending point and, when the probe sat on a circle, the
    angle theta at which evaluation failed.
    """

    def __init__(self, message, point=None, theta=None):
        super().__init__(message)
        self.point = point
        self.theta = theta


class NumericFailure(CvxlabError):
    """A numerical routine (SVD, eigensolver) failed to converge."""

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


class InfeasibleError(CvxlabError):
    """An optimization problem has an empty feasible set."""


class NotUniformlyConvex(CvxlabError):
    """A modulus curve touches zero where a positive value is required."""


class DegenerateDefiningFunction(CvxlabError):
    """The gradient of a defining function vanishes at a boundary point."""


class NonSmoothPoint(CvxlabError):
    """One-sided derivatives disagree: the defining function has a kink."""

    def __init__(self, message, point=None, disagreement=None):
        super().__init__(message)
        self.point = point
        self.disagreement = disagreement


class SamplingError(CvxlabError):
    """A sampler could not produce the requested points."""


class NoDataError(CvxlabError):
    """A scan skipped every sample and has nothing to report."""


class ResolutionError(CvxlabError):
    """A grid is too coarse for the requested operation."""


class SchemaError(CvxlabError):
    """A config, report or replay payload does not match its schema."""
