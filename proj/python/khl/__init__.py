"""Kernel halfspace learning with the zero-one loss.

Thin wrapper over the C++ extension module; see the project README for the
library and CLI documentation.
"""

from ._khl import *  # noqa: F401,F403
from ._khl import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
