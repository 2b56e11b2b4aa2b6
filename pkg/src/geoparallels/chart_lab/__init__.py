"""Coordinate-chart Riemannian geometry for model 4-manifolds."""

from .charts import *  # noqa: F401,F403
from .curvature import *  # noqa: F401,F403
from .functionals import *  # noqa: F401,F403
from .geodesics import *  # noqa: F401,F403
from . import charts, curvature, functionals, geodesics

__all__ = charts.__all__ + curvature.__all__ + functionals.__all__ + geodesics.__all__
