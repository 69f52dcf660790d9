"""Topological entropy of nonautonomous systems on sampled compact spaces."""

from . import coupled, entropy, space, symbolic, systems
from .errors import NAEntropyError
from .entropy import BACKEND

__version__ = "0.1.0"

__all__ = ["coupled", "entropy", "space", "symbolic", "systems", "NAEntropyError", "BACKEND"]
