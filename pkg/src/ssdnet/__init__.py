# Licensed under a 3-clause BSD style license - see LICENSE.rst
"""
`ssdnet` forecasts time series with a sequence encoder (Transformer or LSTM)
whose outputs parametrize a fixed state-space decoder. Forecasts are Gaussian
at every horizon step and split exactly into a trend and a seasonal
component. The package includes a small reverse-mode autodiff engine, the
data pipeline from CSV files to training windows, training with early
stopping, evaluation against naive baselines and hdf5 checkpoints.
"""

from .version import get_version

__version__ = get_version()
del get_version

from .errors import *  # noqa: E402
from . import tensor  # noqa: E402
from .tensor import Parameter, Tape, Tensor  # noqa: E402
from .ssm import *  # noqa: E402
from .encoders import *  # noqa: E402
from .metrics import *  # noqa: E402
from .utils import *  # noqa: E402
from .models import *  # noqa: E402
from .core import *  # noqa: E402
from .analysis import *  # noqa: E402
from .config import *  # noqa: E402
