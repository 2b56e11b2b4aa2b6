"""Geodesic balls by polar shooting.

Each direction of a product quadrature on the unit sphere of ``T_p M`` is
integrated along its geodesic together with the Jacobi fields
``Y = d gamma / d v0``.  The volume density in geodesic polar coordinates is
``sqrt(det g) |det(Y E)| / t`` where ``E`` is a ``g_p``-orthonormal frame, and
it is accumulated alongside the geodesic with the same RK4 steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.special import roots_jacobi

from ..profiles import Profile, monotonicity
from .charts import ChartError, MetricChart
from .curvature import christoffel_and_derivative, curvature_batch, metric_jet

__all__ = [
    "PartialBallError",
    "sphere_quadrature",
    "BallShot",
    "shoot_ball",
    "geodesic_ball_volume",
    "volume_ratio_profile",
    "RegularityProbe",
    "regularity_probe",
]


class PartialBallError(ChartError):
    """A geodesic left the chart before reaching the requested radius."""


def sphere_quadrature(n: int, m: int = 6) -> tuple[np.ndarray, np.ndarray]:
    """Directions and weights on the unit sphere ``S^(n-1)``.

    Built recursively: ``omega = (cos psi, sin psi * omega')`` with Gauss-Jacobi
    nodes in ``cos psi`` and an equispaced circle at the bottom.  The weights
    sum to the area of the sphere.
    """
    if n < 2:
        raise ValueError("n >= 2 required")
    if n == 2:
        k = 2 * m
        phi = 2 * np.pi * (np.arange(k) + 0.5) / k
        return np.stack([np.cos(phi), np.sin(phi)], axis=1), np.full(k, 2 * np.pi / k)
    a = (n - 3) / 2
    t, wt = roots_jacobi(m, a, a)
    sub, wsub = sphere_quadrature(n - 1, m)
    s = np.sqrt(1 - t**2)
    dirs = np.concatenate([np.column_stack([np.full(len(sub), ti), si * sub]) for ti, si in zip(t, s)])
    w = np.concatenate([wi * wsub for wi in wt])
    return dirs, w


@dataclass(frozen=True)
class BallShot:
    """Cumulative ball quantities on the shooting grid ``t``."""

    t: np.ndarray
    volume: np.ndarray
    dvolume: np.ndarray
    energy: np.ndarray | None
    denergy: np.ndarray | None
    peak_rm: np.ndarray | None  # running max of |Rm| over the ball of radius t
    endpoints: np.ndarray

    def volume_at(self, r):
        return CubicHermiteSpline(self.t, self.volume, self.dvolume)(r)

    def energy_at(self, r):
        return CubicHermiteSpline(self.t, self.energy, self.denergy)(r)

    def peak_within(self, r):
        idx = np.searchsorted(self.t, r, side="right")
        return float(self.peak_rm[max(idx, 1) - 1])


def _frame(g):
    w, U = np.linalg.eigh(g)
    if np.min(w) <= 0:
        raise ChartError("metric not positive definite")
    return U @ np.diag(w**-0.5) @ U.T


def _injectivity(chart: MetricChart) -> float:
    if chart.period is None:
        return np.inf
    d = np.diag(chart.metric(np.zeros((1, chart.dim)))[0])
    return 0.5 * chart.period * float(np.sqrt(d.min()))


def shoot_ball(
    chart: MetricChart,
    p,
    r: float,
    resolution: int = 6,
    steps: int | None = None,
    with_curvature: bool = False,
) -> BallShot:
    p = np.asarray(p, float)
    n = chart.dim
    if r <= 0:
        raise ValueError("radius must be positive")
    if r > _injectivity(chart):
        raise PartialBallError(f"{chart.name}: radius {r} exceeds the injectivity radius")
    h = chart.fd_step
    if not chart.contains(p, 2 * h):
        raise ChartError(f"{chart.name}: center {p} not interior")
    steps = steps or max(32, int(np.ceil(r / 0.02)))
    dt = r / steps
    omega, weights = sphere_quadrature(n, resolution)
    D = len(omega)
    E = _frame(chart.metric(p[None])[0])
    v0 = omega @ E.T

    def rhs(t, x, v, Y, W):
        g, dg, ddg = metric_jet(chart, x, h)
        Gam, dGam = christoffel_and_derivative(g, dg, ddg)
        vv = (v[:, :, None] * v[:, None, :]).reshape(D, n * n, 1)
        a = -(Gam.reshape(D, n, n * n) @ vv)[..., 0]
        dGvv = (dGam.reshape(D, n, n, n * n) @ vv[:, None])[..., 0]
        Gv = Gam @ v[:, None, :, None]
        B = -(dGvv.transpose(0, 2, 1) @ Y) - 2 * (Gv[..., 0] @ W)
        if t > 0:
            dens = np.sqrt(np.linalg.det(g)) * np.abs(np.linalg.det(Y @ E)) / t
        else:
            dens = np.zeros(D) if n > 1 else np.ones(D)
        rm2 = curvature_batch(g, dg, ddg, checks=False).rm_norm2 if with_curvature else None
        return (v, a, W, B), dens, rm2

    x = np.repeat(p[None], D, axis=0)
    v = v0.copy()
    Y = np.zeros((D, n, n))
    W = np.repeat(np.eye(n)[None], D, axis=0)
    acc = np.zeros(D)
    en = np.zeros(D)
    ts = [0.0]
    vols, dvols, ens, dens_e, peaks = [0.0], [], [0.0], [], []

    (dx, dv, dY, dW), d0, rm0 = rhs(0.0, x, v, Y, W)
    dvols.append(float(weights @ d0))
    if with_curvature:
        dens_e.append(float(weights @ (d0 * rm0)))
        peaks.append(float(np.sqrt(max(rm0.max(), 0.0))))
    k1 = ((dx, dv, dY, dW), d0, rm0)
    for s in range(steps):
        t = s * dt
        state = (x, v, Y, W)
        ks = [k1]
        for c, tc in ((0.5, t + 0.5 * dt), (0.5, t + 0.5 * dt), (1.0, t + dt)):
            prev = ks[-1][0]
            st = tuple(a + c * dt * b for a, b in zip(state, prev))
            ks.append(rhs(tc, *st))
        coef = (1, 2, 2, 1)
        x, v, Y, W = (
            state[i] + dt / 6 * sum(cf * k[0][i] for cf, k in zip(coef, ks)) for i in range(4)
        )
        acc = acc + dt / 6 * sum(cf * k[1] for cf, k in zip(coef, ks))
        if with_curvature:
            en = en + dt / 6 * sum(cf * k[1] * k[2] for cf, k in zip(coef, ks))
        if not np.all(chart.contains(x, 2 * h)):
            raise PartialBallError(f"{chart.name}: geodesic left the chart before radius {r}")
        k1 = rhs(t + dt, x, v, Y, W)
        ts.append(t + dt if s < steps - 1 else r)
        vols.append(float(weights @ acc))
        dvols.append(float(weights @ k1[1]))
        if with_curvature:
            ens.append(float(weights @ en))
            dens_e.append(float(weights @ (k1[1] * k1[2])))
            peaks.append(max(peaks[-1], float(np.sqrt(max(k1[2].max(), 0.0)))))
    return BallShot(
        np.array(ts), np.array(vols), np.array(dvols),
        np.array(ens) if with_curvature else None,
        np.array(dens_e) if with_curvature else None,
        np.array(peaks) if with_curvature else None,
        x,
    )


def geodesic_ball_volume(chart: MetricChart, p, r: float, **kw) -> float:
    return float(shoot_ball(chart, p, r, **kw).volume[-1])


def volume_ratio_profile(chart: MetricChart, p, radii, rtol: float = 1e-6, **kw) -> Profile:
    """``Vol(B(p, r)) / r^n`` at ascending radii with a monotonicity verdict."""
    radii = np.asarray(radii, float)
    if np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be strictly ascending")
    shot = shoot_ball(chart, p, float(radii[-1]), **kw)
    vals = shot.volume_at(radii) / radii**chart.dim
    return Profile(radii, vals, monotonicity(vals, rtol * np.max(np.abs(vals))))


class RegularityProbe(NamedTuple):
    energy: float
    peak: float


def regularity_probe(chart: MetricChart, p, r: float, **kw) -> RegularityProbe:
    """``int_{B(p,r)} |Rm|^2`` and ``sup_{B(p,r/2)} |Rm| * (r/2)^2``."""
    shot = shoot_ball(chart, p, r, with_curvature=True, **kw)
    return RegularityProbe(float(shot.energy[-1]), shot.peak_within(r / 2) * (r / 2) ** 2)
