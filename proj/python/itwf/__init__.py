"""Truncated Wirtinger flow phase retrieval (full-gradient and incremental)."""

from ._itwf import *  # noqa: F401,F403
from ._itwf import ConfigError, IoError  # noqa: F401

__version__ = "0.1.0"
