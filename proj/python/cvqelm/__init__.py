"""Continuous-variable photonic quantum extreme learning machines.

Thin python layer over the C++ core: Gaussian-state simulation of the random
photonic substrate, PNR/homodyne feature extraction, linear readouts, the MLP
baseline, dataset utilities, and the experiment harness.
"""

from cvqelm._core import *  # noqa: F401,F403
from cvqelm._core import __version__  # noqa: F401
