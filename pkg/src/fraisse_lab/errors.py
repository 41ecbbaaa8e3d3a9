"""Exception types shared across the package."""


class FraisseError(Exception):
    pass


class SearchBoundExceeded(FraisseError):
    """An exhaustive search would exceed the configured vertex bound."""


class DepthInsufficient(FraisseError):
    """The finite approximant is too shallow to answer exactly; deepen and retry."""


class ClassMismatch(FraisseError):
    pass


class EmptyBase(FraisseError):
    """A local independence relation was queried over the empty set."""


class BaseMismatch(FraisseError):
    pass


class MenuRequired(FraisseError):
    """Metric extensions need a finite menu of rational distances."""


class InternalInvariantViolation(FraisseError):
    """A construction produced something a proven lemma says cannot happen."""


class DepthCaveat(UserWarning):
    """A metric-dependent answer was computed past the visible depth of a fragment."""
