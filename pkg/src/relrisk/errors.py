"""Exception types shared across the toolkit."""


class EffectMeasureError(Exception):
    """Base class for every computational error raised by relrisk."""


class UndefinedMeasure(EffectMeasureError, ZeroDivisionError):
    """The measure's denominator risk (or survival) is zero."""


class NotClosed(EffectMeasureError, ValueError):
    """Inverting a measure implied a probability outside [0, 1]."""

    def __init__(self, message: str, implied: float):
        super().__init__(message)
        self.implied = implied


class EmptyMargin(EffectMeasureError, ValueError):
    """An exposure arm of a 2x2 table has no observations."""


class ZeroCell(EffectMeasureError, ValueError):
    """A cell needed by a log-scale standard error is zero."""


class MonotonicityViolated(EffectMeasureError, ValueError):
    pass


class EmptyPopulation(EffectMeasureError, ValueError):
    pass


class InconsistentPattern(EffectMeasureError, ValueError):
    """The observed direction of effect contradicts the asserted switch pattern."""


class CollinearDesign(EffectMeasureError, ValueError):
    pass


class SeparationDetected(EffectMeasureError, RuntimeError):
    """A fitted mean is pinned at the edge of the parameter space."""


class NotConverged(RuntimeWarning):
    """IRLS hit its iteration cap; the result carries ``converged=False``."""
