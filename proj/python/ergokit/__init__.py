"""Work-extraction resources and free-operation certification for finite quantum systems."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
