"""Exception hierarchy.

Errors fall in three groups that the command line maps to exit codes:
domain errors (invalid inputs or undefined quantities), estimation errors
(an estimator cannot produce a trustworthy number from the data), and
configuration errors (raised by :mod:`automation_risk.config`).
"""


class AutomationRiskError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AutomationRiskError, ValueError):
    """An input lies outside the domain where the quantity is defined."""


class InvalidCurveError(DomainError):
    """A curve violates its range or monotonicity contract."""


class NondifferentiableError(DomainError):
    """Derivative requested at a kink or step of a curve."""


class UnsupportedCurveError(DomainError):
    """A solver was handed a curve family it cannot work with."""


class UndefinedPosteriorError(DomainError):
    """Bayes update with a zero normalising constant."""


class UnitError(DomainError):
    """Quantities measured over different periods were combined."""


class UnidentifiedError(DomainError):
    """The target quantity is not identified at these inputs."""


class InvalidRateError(DomainError):
    """A derived probability falls outside [0, 1]."""


class EstimationError(AutomationRiskError):
    """An estimator refused to produce a point estimate."""


class SingularDesignError(EstimationError):
    """The regression design matrix is rank deficient."""


class WeakInstrumentError(EstimationError):
    """First-stage F statistic below the relevance threshold."""


class IncompletePanelError(EstimationError):
    """A group x period cell needed by the panel estimator is empty."""


class SparseWindowError(EstimationError):
    """Too few observations inside the bandwidth on one side of the cutoff."""
