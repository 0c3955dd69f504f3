"""Geometric quantum mechanics on complex projective space."""

from .errors import *  # noqa: F401,F403
from .hermitian import *  # noqa: F401,F403
from .projective import *  # noqa: F401,F403
from .geodesics import *  # noqa: F401,F403
from .observables import *  # noqa: F401,F403
from .spectral import *  # noqa: F401,F403
from .probability import *  # noqa: F401,F403

__version__ = "0.1.0"
