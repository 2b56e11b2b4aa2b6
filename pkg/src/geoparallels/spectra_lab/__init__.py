"""Second-variation operators: Jacobi spectra and the flat-torus Lichnerowicz spectrum."""

from .jacobi import *  # noqa: F401,F403
from .lichnerowicz import *  # noqa: F401,F403
from .report import *  # noqa: F401,F403
from . import jacobi, lichnerowicz, report

__all__ = jacobi.__all__ + lichnerowicz.__all__ + report.__all__
