"""Batch experiment runner: configurations, manifests and CSV/SVG artifacts."""

from .artifacts import *  # noqa: F401,F403
from .cli import *  # noqa: F401,F403
from .config import *  # noqa: F401,F403
from .manifest import *  # noqa: F401,F403
from . import artifacts, cli, config, manifest

__all__ = artifacts.__all__ + cli.__all__ + config.__all__ + manifest.__all__
