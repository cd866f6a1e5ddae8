"""Beam-space MIMO simulation of a switched parasitic dipole array."""

from ._beamspace import *  # noqa: F401,F403
from ._beamspace import __version__  # noqa: F401

DIODE_LOADS = [DIODE_FORWARD, DIODE_REVERSE]  # noqa: F405
