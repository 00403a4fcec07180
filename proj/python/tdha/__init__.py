"""Hyperbolic few-shot adapter over CLIP-style embeddings.

Thin wrapper over the C++ core. Reports are returned as the same JSON
documents the ``tdha`` command-line tool writes.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

__version__ = "0.1.0"
