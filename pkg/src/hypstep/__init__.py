"""Exact scattering theory of the hyperbolic step potential."""

from .errors import *  # noqa: F401,F403
from .model import PotentialParams

__version__ = "0.1.0"
__all__ = ["PotentialParams"]
