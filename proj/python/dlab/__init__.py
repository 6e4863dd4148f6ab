from ._dlab import *  # noqa: F401,F403
from ._dlab import __version__  # noqa: F401
