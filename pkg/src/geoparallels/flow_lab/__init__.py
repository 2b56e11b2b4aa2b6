"""Mean curvature flow on meshes and Ricci flow on metric families."""

from .mcf import *  # noqa: F401,F403
from .ricci import *  # noqa: F401,F403
from .trajectory import *  # noqa: F401,F403
from . import mcf, ricci, trajectory

__all__ = mcf.__all__ + ricci.__all__ + trajectory.__all__
