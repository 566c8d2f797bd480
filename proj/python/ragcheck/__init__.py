"""Hallucination detection and retrieval toolkit for grounded QA."""

from ._ragcheck import *  # noqa: F401,F403
from ._ragcheck import __version__  # noqa: F401
