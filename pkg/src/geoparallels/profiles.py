"""Radial profiles and their monotonicity verdicts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Profile", "monotonicity"]


def monotonicity(values, atol: float) -> str:
    """Classify a series as constant, increasing, decreasing, non-increasing,
    non-decreasing or non-monotone, with differences inside ``atol`` treated as ties."""
    d = np.diff(np.asarray(values, float))
    if len(d) == 0 or np.all(np.abs(d) <= atol):
        return "constant"
    if np.all(d > atol):
        return "increasing"
    if np.all(d < -atol):
        return "decreasing"
    if np.all(d <= atol):
        return "non-increasing"
    if np.all(d >= -atol):
        return "non-decreasing"
    return "non-monotone"


@dataclass(frozen=True)
class Profile:
    radii: np.ndarray
    values: np.ndarray
    verdict: str

    @property
    def nonincreasing(self) -> bool:
        return self.verdict in ("constant", "decreasing", "non-increasing")

    @property
    def nondecreasing(self) -> bool:
        return self.verdict in ("constant", "increasing", "non-decreasing")
