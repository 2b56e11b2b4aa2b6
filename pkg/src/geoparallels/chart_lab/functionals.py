"""Global functionals and topological gates on model charts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .charts import ChartError, MetricChart
from .curvature import curvature_batch, metric_jet

__all__ = [
    "QuadratureError",
    "EinsteinHilbert",
    "einstein_hilbert",
    "quadrature_nodes",
    "kahler_compat_check",
    "TopologicalData",
    "euler_from_cells",
    "hitchin_thorpe",
]


class QuadratureError(RuntimeError):
    pass


class EinsteinHilbert(NamedTuple):
    value: float
    total_scalar: float
    volume: float


def _axis_rule(lo: float, hi: float, m: int):
    """Gauss-Legendre nodes on a finite coordinate interval."""
    s, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (hi - lo) * s + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def _polar_rule(d: int, m: int):
    """Nodes and weights on all of R^d in polar form.

    The radius uses Gauss-Legendre nodes in ``u = rho^2 / (1 + rho^2)``, which
    turns the radial volume integrand of stereographic and affine charts into
    a polynomial and keeps the outermost node at moderate radius.
    """
    from .geodesics import sphere_quadrature

    s, w = np.polynomial.legendre.leggauss(m)
    u = 0.5 * (s + 1)
    rho = np.sqrt(u / (1 - u))
    wr = 0.5 * w * rho ** (d - 1) / (2 * np.sqrt(u) * (1 - u) ** 1.5)
    if d == 1:
        dirs, wd = np.array([[1.0], [-1.0]]), np.ones(2)
    else:
        dirs, wd = sphere_quadrature(d, max(2, m // 2))
    X = (rho[:, None, None] * dirs[None]).reshape(-1, d)
    return X, np.outer(wr, wd).ravel()


def _tensor(rules):
    X, W = rules[0]
    for Y, V in rules[1:]:
        X = np.concatenate([np.repeat(X, len(Y), axis=0), np.tile(Y, (len(X), 1))], axis=1)
        W = np.outer(W, V).ravel()
    return X, W


def quadrature_nodes(chart: MetricChart, order: int):
    """Quadrature over the chart domain.

    Finite boxes use tensor Gauss-Legendre.  Unbounded charts use a polar
    rule on each block of ``chart.meta["polar_blocks"]`` (default: one block
    of full dimension), which is exact in the radius for metrics that are
    radial within each block.
    """
    lo, hi = np.asarray(chart.lower, float), np.asarray(chart.upper, float)
    if np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)):
        rules = [_axis_rule(a, b, order) for a, b in zip(lo, hi)]
        return _tensor([(x[:, None], w) for x, w in rules])
    if np.any(np.isfinite(lo)) or np.any(np.isfinite(hi)):
        raise ChartError("partly infinite coordinate boxes are not supported")
    blocks = chart.meta.get("polar_blocks", (chart.dim,))
    if sum(blocks) != chart.dim:
        raise ChartError(f"{chart.name}: polar blocks {blocks} do not add up to dimension {chart.dim}")
    return _tensor([_polar_rule(d, order) for d in blocks])


def einstein_hilbert(
    chart: MetricChart,
    order: int = 10,
    volume_rtol: float = 2e-3,
    rel_step: float = 2e-2,
    stencil: int = 8,
    chunk: int = 1024,
) -> EinsteinHilbert:
    """``int R dvol / Vol^((n-2)/n)`` by Gauss quadrature over the chart domain.

    The exponent makes the value invariant under constant rescaling of the
    metric (``1/2`` in dimension four).  Curvature uses high-order stencils
    with per-axis steps ``rel_step * max(1, rho)``, ``rho`` the radius of the
    axis' block: far nodes of unbounded charts are badly conditioned and
    small steps amplify rounding there.  Nodes outside
    ``chart.inside`` carry zero weight.  When the chart covers a model with a
    registered closed-form volume, a quadrature volume off by more than
    ``volume_rtol`` raises :class:`QuadratureError`.
    """
    X, W = quadrature_nodes(chart, order)
    if chart.inside is not None:
        keep = chart.inside(X)
        X, W = X[keep], W[keep]
    # per-axis steps scale with the radius of the axis' block, keeping far blocks well conditioned
    bounds = np.cumsum((0,) + tuple(chart.meta.get("polar_blocks", (chart.dim,))))
    radius = np.empty_like(X)
    for a, b in zip(bounds[:-1], bounds[1:]):
        radius[:, a:b] = np.linalg.norm(X[:, a:b], axis=1, keepdims=True)
    total_r = 0.0
    vol = 0.0
    for i in range(0, len(X), chunk):
        Xc = X[i : i + chunk]
        h = rel_step * np.maximum(1.0, radius[i : i + chunk])
        g, dg, ddg = metric_jet(chart, Xc, h, order=stencil)
        R = curvature_batch(g, dg, ddg).scalar
        dv = np.sqrt(np.linalg.det(g)) * W[i : i + chunk]
        total_r += float(R @ dv)
        vol += float(dv.sum())
    if chart.covers_model and chart.model_volume is not None:
        err = abs(vol / chart.model_volume - 1)
        if err > volume_rtol:
            raise QuadratureError(
                f"{chart.name}: quadrature volume {vol:.6g} vs {chart.model_volume:.6g} "
                f"(rel {err:.1e}); raise the order"
            )
    return EinsteinHilbert(total_r / vol ** ((chart.dim - 2) / chart.dim), total_r, vol)


def kahler_compat_check(chart: MetricChart, samples) -> float:
    """Max of ``|g(JX, JY) - g(X, Y)|`` over sample points and coordinate pairs."""
    if chart.J is None:
        raise ChartError(f"{chart.name}: no almost-complex structure")
    J = np.asarray(chart.J, float)
    n = chart.dim
    if np.abs(J @ J + np.eye(n)).max() > 1e-12:
        raise ChartError(f"{chart.name}: J^2 != -1")
    G = chart.metric(np.atleast_2d(np.asarray(samples, float)))
    return float(np.abs(np.einsum("ai,nab,bj->nij", J, G, J) - G).max())


@dataclass(frozen=True)
class TopologicalData:
    """Signature, Euler characteristic and optional cell counts of a closed 4-manifold."""

    signature: int
    euler: int
    cell_counts: tuple | None = None

    def __post_init__(self):
        if self.cell_counts is not None and euler_from_cells(self.cell_counts) != self.euler:
            raise ValueError(
                f"euler {self.euler} disagrees with cell counts {tuple(self.cell_counts)}"
            )

    @classmethod
    def from_cells(cls, signature: int, cells) -> "TopologicalData":
        return cls(int(signature), euler_from_cells(cells), tuple(int(c) for c in cells))


def euler_from_cells(cells) -> int:
    cells = [int(c) for c in cells]
    if any(c < 0 for c in cells):
        raise ValueError("cell counts must be nonnegative")
    return sum((-1) ** k * c for k, c in enumerate(cells))


def hitchin_thorpe(td: TopologicalData) -> bool:
    """True when ``|tau| <= (2/3) chi``, the necessary condition for an Einstein metric."""
    return 3 * abs(td.signature) <= 2 * td.euler
