"""Ricci flow ``g_t = -2 Ric`` on finite-dimensional linear metric families.

A family ``g = sum_a theta_a g_a`` is flow-invariant when ``-2 Ric`` lies in
the span of the components at every point.  The flow is then an ODE on
theta, obtained by a least-squares projection at sample points and
integrated with RK4.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from ..chart_lab.charts import MetricChart
from ..chart_lab.curvature import curvature_batch, metric_jet
from .trajectory import FlowTrajectory, StepRecord

__all__ = [
    "ProjectionError",
    "MetricFamily",
    "sphere_family",
    "torus_family",
    "s2xs2_family",
    "FAMILIES",
    "ricci_velocity",
    "ricci_flow_family",
]


class ProjectionError(ValueError):
    """-2 Ric is not in the tangent space of the family."""


@dataclass(frozen=True)
class MetricFamily:
    """Metrics ``sum_a theta_a g_a`` on a fixed coordinate chart.

    ``base`` supplies the domain, period and model volume at ``theta = 1``;
    volumes of other members come from ``volume(theta)``.
    """

    name: str
    base: MetricChart
    components: tuple  # callables X -> (N, n, n)
    volume: Callable[[np.ndarray], float]
    lower: tuple = ()
    n_samples: int = 6
    seed: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    def metric(self, theta):
        theta = np.asarray(theta, float)

        def g(X):
            return sum(t * c(X) for t, c in zip(theta, self.components))

        return g

    def chart(self, theta) -> MetricChart:
        theta = np.asarray(theta, float)
        if self.lower and np.any(theta <= np.asarray(self.lower)):
            raise ValueError(f"{self.name}: parameters {theta} left the admissible box")
        return replace(
            self.base,
            name=f"{self.name}{np.round(theta, 6).tolist()}",
            metric=self.metric(theta),
            model_volume=self.volume(theta),
        )

    def samples(self) -> np.ndarray:
        return self.base.sample_points(self.n_samples, np.random.default_rng(self.seed), margin=0.1)


def _stereo2(X, block):
    Y = X[..., block]
    return 4 / (1 + np.sum(Y * Y, axis=-1)) ** 2


def sphere_family() -> MetricFamily:
    """Round S^4 scaled by s: ``s * 4 delta / (1 + |x|^2)^2``."""
    from ..chart_lab.charts import round_sphere

    base = round_sphere()
    v1 = base.model_volume
    return MetricFamily("s4", base, (base.metric,), lambda th: v1 * th[0] ** 2, lower=(0.0,))


def torus_family(side: float = 1.0) -> MetricFamily:
    """Flat 4-torus with independent constant scales on each axis."""
    from ..chart_lab.charts import flat_torus

    base = flat_torus(side)

    def comp(a):
        def c(X):
            G = np.zeros(X.shape[:-1] + (4, 4))
            G[..., a, a] = 1.0
            return G

        return c

    return MetricFamily(
        "torus", base, tuple(comp(a) for a in range(4)),
        lambda th: side**4 * float(np.sqrt(np.prod(th))), lower=(0.0,) * 4,
    )


def s2xs2_family() -> MetricFamily:
    """S^2 x S^2 with squared radii ``(theta_1, theta_2)``."""
    from ..chart_lab.charts import product_s2xs2

    base = product_s2xs2()

    def comp(block, idx):
        def c(X):
            G = np.zeros(X.shape[:-1] + (4, 4))
            f = _stereo2(X, block)
            for i in idx:
                G[..., i, i] = f
            return G

        return c

    return MetricFamily(
        "s2xs2", base, (comp(slice(0, 2), (0, 1)), comp(slice(2, 4), (2, 3))),
        lambda th: (4 * np.pi) ** 2 * th[0] * th[1], lower=(0.0, 0.0),
    )


FAMILIES = {"s4": sphere_family, "torus": torus_family, "s2xs2": s2xs2_family}


def ricci_velocity(family: MetricFamily, theta, tol: float = 1e-4) -> tuple[np.ndarray, float]:
    """Least-squares ``d theta / dt`` from ``-2 Ric`` and its relative residual."""
    chart = family.chart(theta)
    X = family.samples()
    g, dg, ddg = metric_jet(chart, X)
    target = -2 * curvature_batch(g, dg, ddg).ricci
    A = np.stack([c(X).ravel() for c in family.components], axis=1)
    b = target.ravel()
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    scale = max(float(np.abs(g).max()), float(np.abs(b).max()))
    resid = float(np.abs(A @ sol - b).max()) / scale
    if resid > tol:
        raise ProjectionError(
            f"{family.name}: -2 Ric leaves the family tangent space (relative residual {resid:.2e})"
        )
    return sol, resid


def ricci_flow_family(
    family: MetricFamily,
    theta0,
    dt: float,
    t_end: float,
    normalized: bool = False,
    tol: float = 1e-4,
) -> FlowTrajectory:
    """RK4 integration of the projected Ricci flow.

    In normalized mode each step is followed by the rescaling
    ``theta -> c theta`` that restores the initial volume; for a linear family
    in dimension n that factor is ``(V0 / V)^(2/n)``.
    """
    theta = np.asarray(theta0, float)
    n = family.base.dim
    v0 = family.volume(theta)
    traj = FlowTrajectory("ricci")
    vel, _ = ricci_velocity(family, theta, tol)
    traj.append(0.0, theta, v0, np.abs(vel).max())
    steps = max(1, int(round(t_end / dt)))
    h = t_end / steps
    for k in range(steps):
        t = k * h
        k1 = vel
        k2, _ = ricci_velocity(family, theta + 0.5 * h * k1, tol)
        k3, _ = ricci_velocity(family, theta + 0.5 * h * k2, tol)
        k4, _ = ricci_velocity(family, theta + h * k3, tol)
        theta = theta + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if normalized:
            theta = theta * (v0 / family.volume(theta)) ** (2 / n)
        vel, _ = ricci_velocity(family, theta, tol)
        traj.step_log.append(StepRecord(t, h, True))
        traj.append((k + 1) * h, theta, family.volume(theta), np.abs(vel).max())
    traj.stop_reason = "t_end"
    return traj
