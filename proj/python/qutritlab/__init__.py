"""Dispersive-readout laboratory for a three-level superconducting circuit."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
