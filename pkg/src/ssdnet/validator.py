# Licensed under a 3-clause BSD style license - see LICENSE.rst
import numbers

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "validate_scalar",
    "validate_array",
    "validate_integer",
    "validate_choice",
]


def validate_scalar(name, value, domain=None, error=ConfigurationError):

    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(
            "{0} should be a scalar floating point value".format(name)
        )
    if not np.isfinite(value):
        raise error("{0} should be finite".format(name))

    if domain == "positive":
        if value < 0.0:
            raise error("{0} should be positive".format(name))
    elif domain == "strictly-positive":
        if value <= 0.0:
            raise error("{0} should be strictly positive".format(name))
    elif domain == "probability":
        if not 0.0 < value < 1.0:
            raise error(
                "{0} should be in the open interval (0, 1)".format(name)
            )
    elif domain == "rate":
        if not 0.0 <= value < 1.0:
            raise error("{0} should be in the range [0:1)".format(name))
    elif type(domain) in [tuple, list] and len(domain) == 2:
        if value < domain[0] or value > domain[-1]:
            raise error(
                "{0} should be in the range [{1}:{2}]".format(
                    name, domain[0], domain[-1]
                )
            )

    return value


def validate_array(name, value, domain=None, ndim=1, error=ConfigurationError):

    value = np.asarray(value)
    if not np.issubdtype(value.dtype, np.number):
        raise TypeError("{0} should be a numeric array".format(name))
    if value.ndim != ndim:
        raise error(
            "{0} should have {1} dimension(s), got {2}".format(
                name, ndim, value.ndim
            )
        )
    if not np.all(np.isfinite(value)):
        raise error("{0} should be finite".format(name))

    if domain == "positive":
        if np.any(value < 0.0):
            raise error("{0} should be positive".format(name))
    elif domain == "strictly-positive":
        if np.any(value <= 0.0):
            raise error("{0} should be strictly positive".format(name))

    return value


def validate_integer(name, value, minimum=None, error=ConfigurationError):

    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError("{0} should be an integer".format(name))
    if minimum is not None and value < minimum:
        raise error("{0} should be at least {1}".format(name, minimum))

    return int(value)


def validate_choice(name, value, choices, error=ConfigurationError):

    if value not in choices:
        raise error(
            "{0} should be one of {1} (got {2!r})".format(
                name, ", ".join(str(c) for c in choices), value
            )
        )

    return value
