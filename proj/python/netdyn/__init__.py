"""Conservative and non-conservative dynamics, centrality and influence on directed graphs."""

from ._core import *  # noqa: F401,F403
from ._core import Error, InputFormatError, InvalidArgument, NonConvergence, NumericalError  # noqa: F401

__version__ = "0.1.0"
