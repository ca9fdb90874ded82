"""Exception and warning types shared across the package."""


class QLBreaksError(Exception):
    """Base class for all package errors."""


class ParameterError(QLBreaksError, ValueError):
    """Parameter vector is malformed (wrong dimension, non-finite entries)."""


class DomainError(QLBreaksError, ValueError):
    """Parameter is outside the admissible domain (box, variance floor,
    or contraction region)."""


class ConfigurationError(QLBreaksError, ValueError):
    """Invalid run configuration (innovation law, penalty, experiment setup)."""


class DegenerateInformationError(QLBreaksError, RuntimeError):
    """The estimated information matrix is numerically singular; confidence
    intervals cannot be produced for this segment."""


class BoundaryWarning(UserWarning):
    """Derivatives were requested at a parameter sitting on the domain-box
    boundary; values are still returned."""
