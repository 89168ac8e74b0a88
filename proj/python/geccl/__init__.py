"""GEC curriculum-learning toolkit: python bindings over the C++ core."""

from ._geccl import *  # noqa: F401,F403
from ._geccl import __doc__  # noqa: F401
