"""GPS-assisted 802.11 handoff prediction on hexagonal AP maps."""

from ._hexhand import *  # noqa: F401,F403
from ._hexhand import __version__  # noqa: F401
