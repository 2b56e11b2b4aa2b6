"""Surfaces in R^3: parametric patches, fundamental forms, meshes, discrete curvature."""

from .mesh import *  # noqa: F401,F403
from .meshio import *  # noqa: F401,F403
from .patches import *  # noqa: F401,F403
from . import mesh as _mesh, meshio as _meshio, patches as _patches

__all__ = _patches.__all__ + _mesh.__all__ + _meshio.__all__
