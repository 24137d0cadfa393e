class QbsdeError(Exception):
    """Base class for all package errors."""


class ConfigurationError(QbsdeError):
    """Inconsistent grids, dimensions, CFL violations, bad configs."""


class EvaluationError(QbsdeError):
    """A coefficient returned a non-finite value; the message names the point."""
