from .descriptors import *  # noqa: F401,F403
from .spaces import *  # noqa: F401,F403
