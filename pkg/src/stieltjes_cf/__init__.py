"""Continued-fraction calculus for rational matrix-valued Stieltjes functions."""
from .core import *  # noqa: F401,F403
from .engine import *  # noqa: F401,F403
from .composites import *  # noqa: F401,F403
from .errors import *  # noqa: F401,F403

__version__ = "0.1.0"
