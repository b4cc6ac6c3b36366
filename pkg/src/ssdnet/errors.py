# Licensed under a 3-clause BSD style license - see LICENSE.rst
"""
Exceptions raised by `ssdnet`.

Every class derives from `SSDNetError` and from the closest builtin exception,
so code catching ``ValueError`` or ``ArithmeticError`` keeps working.
"""

__all__ = [
    "SSDNetError",
    "ShapeError",
    "DomainError",
    "NumericError",
    "ContractError",
    "ConfigurationError",
    "IngestionError",
    "CheckpointError",
    "TrainingDivergedError",
]


class SSDNetError(Exception):
    pass


class ShapeError(SSDNetError, ValueError):
    pass


class DomainError(SSDNetError, ValueError):
    pass


class NumericError(SSDNetError, ArithmeticError):
    pass


class ContractError(SSDNetError, ValueError):
    pass


class ConfigurationError(SSDNetError, ValueError):
    pass


class IngestionError(SSDNetError, ValueError):
    pass


class CheckpointError(SSDNetError, ValueError):
    pass


class TrainingDivergedError(SSDNetError, RuntimeError):
    """Raised when the training loss becomes non-finite.

    The ``bundle`` attribute holds the model with the last weights that gave a
    finite validation loss, so the caller can still save or use it.
    """

    def __init__(self, message, bundle=None, log=None):
        super().__init__(message)
        self.bundle = bundle
        self.log = log
