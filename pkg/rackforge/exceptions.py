"""
Exception hierarchy for rackforge.

Mathematical violations are reported through VerificationReport objects;
exceptions are raised only for unusable input or violated preconditions.
"""


class RackforgeError(Exception):
    """Base class for all rackforge errors."""


class InputError(RackforgeError):
    """Malformed tables, inconsistent dimensions or unreadable fixture files."""


class PreconditionError(RackforgeError):
    """An operation was called outside its domain."""


class ConsistencyError(RackforgeError):
    """An internal invariant failed. Cannot happen for valid input."""


class NumericError(RackforgeError):
    """Root finding, eigenvalue or exact solve failure."""


class ConfigError(RackforgeError):
    """Invalid integration configuration or incompatible group model."""


class ModelError(RackforgeError):
    """A group model broke its contract."""


class CarrierError(RackforgeError):
    """A point does not lie on the rack carrier."""


class ChartError(RackforgeError):
    """A chart evaluation left the carrier."""


class SamplerError(RackforgeError):
    """A sampler produced a point outside the carrier."""


class ConditioningWarning(UserWarning):
    """Float computations with poorly separated eigenvalues."""
