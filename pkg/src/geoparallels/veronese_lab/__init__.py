"""The Veronese surface, the Hopf fibration and eigenfunction immersions of CP^2."""

from .immersion import *  # noqa: F401,F403
from .projective import *  # noqa: F401,F403
from .takahashi import *  # noqa: F401,F403
from . import immersion, projective, takahashi

__all__ = immersion.__all__ + projective.__all__ + takahashi.__all__
