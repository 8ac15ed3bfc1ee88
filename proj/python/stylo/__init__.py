"""Stylometric analysis of morphologically tagged Japanese text."""

from ._stylo import *  # noqa: F401,F403
from ._stylo import __doc__  # noqa: F401

__version__ = "0.1.0"
