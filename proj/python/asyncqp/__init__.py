"""Totally asynchronous block-gradient quadratic programming.

A deterministic multi-agent simulator plus the closed-form stepsize and
regularization planning that makes heterogeneous, uncoordinated parameter
choices safe.
"""

from asyncqp._core import *  # noqa: F401,F403
from asyncqp._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
