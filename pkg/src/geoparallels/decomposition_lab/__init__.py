"""Monotonicity, regularity and stability diagnostics with the two decompositions."""

from .decompose import *  # noqa: F401,F403
from .regions import *  # noqa: F401,F403
from .stability import *  # noqa: F401,F403
from .surface_probes import *  # noqa: F401,F403
from . import decompose, regions, stability, surface_probes

__all__ = decompose.__all__ + regions.__all__ + stability.__all__ + surface_probes.__all__
