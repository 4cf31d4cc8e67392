from ._gsp import *  # noqa: F401,F403
from ._gsp import GspError, run, report

__all__ = [name for name in dir() if not name.startswith("_")]
