from ._raceplan import *  # noqa: F401,F403
from ._raceplan import __version__  # noqa: F401
