"""Exception and warning types raised across the package."""


class ConfNavError(Exception):
    """Base class for every error raised by confnav."""


class DegenerateCurveError(ConfNavError):
    """A sampled curve has a node where the parametric speed vanishes."""


class InvalidCurveError(ConfNavError):
    """A curve specification is malformed or self-intersecting."""


class SingularConfigurationError(ConfNavError):
    """A point coincides with a boundary node, or a center lies on its curve."""


class SolverError(ConfNavError):
    """The Nystrom system is singular or too badly conditioned to trust."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ConstructionError(ConfNavError):
    """Building a map stage failed (wrong-side center, branch tracking, ...)."""


class DomainError(ConfNavError):
    """A query point lies outside the domain of the requested map or function."""


class NonConvergenceError(ConfNavError):
    """Koebe iteration hit its iteration cap before reaching tolerance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class CircleFitError(ConfNavError):
    """An image curve is not circular enough to define a sphere world."""


class StaleCacheError(ConfNavError):
    """A cache file was built from a different workspace or settings."""


class CacheFormatError(ConfNavError):
    """A cache file is corrupt or has an unknown layout."""


class NearBoundaryWarning(UserWarning):
    """A map was evaluated closer to a curve than its quadrature resolves."""
