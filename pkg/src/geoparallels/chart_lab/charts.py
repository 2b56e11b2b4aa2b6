"""Coordinate charts with metric evaluators, and the built-in model catalog.

Metric evaluators are vectorized: ``metric(X)`` takes points of shape
``(..., n)`` and returns symmetric matrices of shape ``(..., n, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

__all__ = [
    "ChartError",
    "MetricChart",
    "standard_J",
    "flat",
    "flat_torus",
    "round_sphere",
    "fubini_study",
    "product_s2xs2",
    "hyperbolic",
    "perturbed",
    "bump",
    "diagonal",
    "CHARTS",
    "get_chart",
]


class ChartError(ValueError):
    pass


def standard_J(n: int = 4) -> np.ndarray:
    """Multiplication by i in coordinates ordered (x1, y1, x2, y2, ...)."""
    J = np.zeros((n, n))
    for a in range(0, n, 2):
        J[a + 1, a] = 1.0
        J[a, a + 1] = -1.0
    return J


@dataclass(frozen=True)
class MetricChart:
    """An n-dimensional coordinate patch carrying a Riemannian metric.

    ``lower``/``upper`` bound the coordinate box (entries may be infinite for
    charts that cover a whole model up to a null set).  ``inside`` refines the
    box for non-rectangular domains.  ``period`` marks a flat torus of that
    side length.  ``model_volume`` records a closed-form total volume when
    the chart covers a compact model.
    """

    name: str
    dim: int
    metric: Callable[[np.ndarray], np.ndarray]
    lower: tuple
    upper: tuple
    J: np.ndarray | None = None
    inside: Callable[[np.ndarray], np.ndarray] | None = None
    covers_model: bool = False
    model_volume: float | None = None
    period: float | None = None
    fd_step: float = 1e-3
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, X) -> np.ndarray:
        return self.metric(np.asarray(X, float))

    def contains(self, X, margin: float = 0.0) -> np.ndarray:
        X = np.asarray(X, float)
        if self.period is not None:
            return np.ones(X.shape[:-1], bool)
        lo = np.asarray(self.lower, float) + margin
        hi = np.asarray(self.upper, float) - margin
        ok = np.all((X >= lo) & (X <= hi), axis=-1)
        if self.inside is not None:
            ok &= self.inside(X)
        return ok

    def scaled(self, c: float) -> "MetricChart":
        """The same chart with metric ``c * g``."""
        g = self.metric
        vol = None if self.model_volume is None else self.model_volume * c ** (self.dim / 2)
        return replace(self, name=f"{self.name}*{c:g}", metric=lambda X: c * g(X), model_volume=vol)

    def sample_box(self) -> tuple[np.ndarray, np.ndarray]:
        """A finite box for random sampling (infinite sides clipped to +-2)."""
        lo = np.clip(np.asarray(self.lower, float), -2.0, None)
        hi = np.clip(np.asarray(self.upper, float), None, 2.0)
        return lo, hi

    def sample_points(self, count: int, rng: np.random.Generator, margin: float = 0.05):
        lo, hi = self.sample_box()
        out = []
        while sum(len(o) for o in out) < count:
            X = rng.uniform(lo + margin, hi - margin, size=(4 * count, self.dim))
            out.append(X[self.contains(X, margin)])
        return np.concatenate(out)[:count]


def _eye(X, n):
    return np.broadcast_to(np.eye(n), X.shape[:-1] + (n, n)).copy()


def _conformal(factor: Callable, n: int):
    eye = np.eye(n)

    def g(X):
        return factor(X)[..., None, None] * eye

    return g


def flat(n: int = 4, half_width: float = 10.0) -> MetricChart:
    return MetricChart(
        "flat", n, lambda X: _eye(X, n), (-half_width,) * n, (half_width,) * n, J=standard_J(n) if n % 2 == 0 else None
    )


def flat_torus(side: float = 1.0, n: int = 4, scales=None) -> MetricChart:
    """Flat torus ``R^n / (side Z)^n`` with optional constant diagonal metric."""
    d = np.ones(n) if scales is None else np.asarray(scales, float)

    def g(X):
        return np.broadcast_to(np.diag(d), X.shape[:-1] + (n, n)).copy()

    vol = side**n * float(np.sqrt(np.prod(d)))
    return MetricChart(
        f"torus{n}", n, g, (0.0,) * n, (side,) * n, J=standard_J(n) if n % 2 == 0 else None,
        covers_model=True, model_volume=vol, period=side, meta={"side": side},
    )


def round_sphere(n: int = 4, radius: float = 1.0) -> MetricChart:
    """Stereographic chart ``g = 4 R^2 delta / (1 + |x|^2)^2`` of the round n-sphere."""
    from scipy.special import gamma

    vol = 2 * np.pi ** ((n + 1) / 2) / gamma((n + 1) / 2) * radius**n
    return MetricChart(
        f"s{n}", n, _conformal(lambda X: 4 * radius**2 / (1 + np.sum(X * X, axis=-1)) ** 2, n),
        (-np.inf,) * n, (np.inf,) * n, covers_model=True, model_volume=float(vol),
        meta={"radius": radius},
    )


def fubini_study() -> MetricChart:
    """Affine chart ``[1 : z1 : z2]`` of CP^2 from the potential ``log(1 + |z|^2)``.

    Real coordinates are ordered (x1, y1, x2, y2) with ``z_a = x_a + i y_a``.
    The real metric is ``Re(h_ab xi_a conj(eta_b))`` with
    ``h_ab = d_a dbar_b log(1 + |z|^2)``: the identity at the origin and
    holomorphic sectional curvature +4.
    """

    def g(X):
        z = X[..., 0::2] + 1j * X[..., 1::2]
        s = 1.0 + np.sum(np.abs(z) ** 2, axis=-1)
        h = (np.eye(2) * s[..., None, None] - np.conj(z)[..., :, None] * z[..., None, :])
        h = h / (s**2)[..., None, None]
        G = np.empty(X.shape[:-1] + (4, 4))
        G[..., 0::2, 0::2] = h.real
        G[..., 1::2, 1::2] = h.real
        G[..., 0::2, 1::2] = h.imag
        G[..., 1::2, 0::2] = -h.imag
        return G

    return MetricChart(
        "fs", 4, g, (-np.inf,) * 4, (np.inf,) * 4, J=standard_J(4),
        covers_model=True, model_volume=np.pi**2 / 2,
    )


def product_s2xs2(r1: float = 1.0, r2: float = 1.0) -> MetricChart:
    def g(X):
        a = 4 * r1**2 / (1 + np.sum(X[..., :2] ** 2, axis=-1)) ** 2
        b = 4 * r2**2 / (1 + np.sum(X[..., 2:] ** 2, axis=-1)) ** 2
        G = np.zeros(X.shape[:-1] + (4, 4))
        G[..., 0, 0] = G[..., 1, 1] = a
        G[..., 2, 2] = G[..., 3, 3] = b
        return G

    return MetricChart(
        "s2xs2", 4, g, (-np.inf,) * 4, (np.inf,) * 4, J=standard_J(4),
        covers_model=True, model_volume=(4 * np.pi * r1**2) * (4 * np.pi * r2**2),
        meta={"polar_blocks": (2, 2)},
    )


def hyperbolic(n: int = 4, reach: float = 0.9) -> MetricChart:
    """Poincare ball ``4 delta / (1 - |x|^2)^2`` restricted to ``|x| < reach``."""
    return MetricChart(
        f"h{n}", n, _conformal(lambda X: 4 / (1 - np.sum(X * X, axis=-1)) ** 2, n),
        (-reach,) * n, (reach,) * n,
        inside=lambda X: np.sum(X * X, axis=-1) < reach**2,
    )


def perturbed(coef: float = 0.5, half_width: float = 3.0) -> MetricChart:
    """Non-Einstein control ``delta + coef * x1^2 * e2 (x) e2``."""

    def g(X):
        G = _eye(X, 4)
        G[..., 1, 1] += coef * X[..., 0] ** 2
        return G

    return MetricChart("perturbed", 4, g, (-half_width,) * 4, (half_width,) * 4, J=standard_J(4))


def bump(amplitude: float = 1.0, width: float = 0.3, half_width: float = 3.0) -> MetricChart:
    """Conformally flat metric with a Gaussian bump of curvature at the origin."""
    return MetricChart(
        "bump", 4,
        _conformal(lambda X: 1 + amplitude * np.exp(-np.sum(X * X, axis=-1) / width**2), 4),
        (-half_width,) * 4, (half_width,) * 4, J=standard_J(4),
    )


def diagonal(diag=(1.0, 2.0, 1.0, 1.0), half_width: float = 3.0) -> MetricChart:
    d = np.asarray(diag, float)
    n = len(d)
    return MetricChart(
        "diag", n, lambda X: np.broadcast_to(np.diag(d), X.shape[:-1] + (n, n)).copy(),
        (-half_width,) * n, (half_width,) * n, J=standard_J(n) if n % 2 == 0 else None,
    )


CHARTS: dict[str, Callable[..., MetricChart]] = {
    "flat": flat,
    "torus": flat_torus,
    "s4": round_sphere,
    "s2": lambda radius=1.0: round_sphere(2, radius),
    "fs": fubini_study,
    "s2xs2": product_s2xs2,
    "hyperbolic": hyperbolic,
    "perturbed": perturbed,
    "bump": bump,
    "diag": diagonal,
}


def get_chart(name: str, **params) -> MetricChart:
    try:
        factory = CHARTS[name]
    except KeyError:
        raise KeyError(f"unknown chart {name!r}; known: {sorted(CHARTS)}") from None
    return factory(**params)
