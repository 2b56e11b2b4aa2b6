"""Certification of immersions whose coordinates are Laplace eigenfunctions.

An immersion ``x`` of an m-manifold into Euclidean space with ``Delta x =
lambda x`` (positive Laplacian) for its induced metric is minimal in the
sphere of radius ``sqrt(m / lambda)``.  Here the immersion is given on a
chart with its own metric ``g``; when the induced metric is ``c g`` the
eigenvalue for the induced metric is ``lambda_fit / c``.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from ..chart_lab.charts import MetricChart, flat_torus, round_sphere
from ..chart_lab.curvature import fd_derivatives, laplace_beltrami

__all__ = [
    "CertificationError",
    "TakahashiReport",
    "takahashi_certify",
    "induced_ratio",
    "eigenmap",
    "sphere_identity",
    "clifford_torus",
    "s2_chart",
    "torus_chart",
]


class CertificationError(ValueError):
    pass


class TakahashiReport(NamedTuple):
    lambda_fit: float
    residual: float
    colinearity: float
    pullback: float
    pullback_cv: float
    lambda_induced: float
    radius: float
    sphere_radius: float
    radius_check: float


def induced_ratio(immersion: Callable, chart: MetricChart, X, h: float = 1e-4) -> np.ndarray:
    """Per-point ratios of the induced metric to ``g`` in a g-orthonormal frame.

    Returns an ``(N, n, n)`` array that equals ``c I`` exactly when the
    pullback is ``c g``.
    """
    X = np.atleast_2d(np.asarray(X, float))
    _, dx, _ = fd_derivatives(immersion, X, h, order=8, second=False)
    G = np.einsum("nai,nbi->nab", dx, dx)
    g = chart.metric(X)
    Linv = np.linalg.inv(np.linalg.cholesky(g))
    return Linv @ G @ np.swapaxes(Linv, -1, -2)


def takahashi_certify(
    immersion: Callable, chart: MetricChart, samples, h: float = 1e-2, cond_tol: float = 1e-12
) -> TakahashiReport:
    """Fit ``Delta_g x = lambda x`` over sample points and check the sphere radius.

    ``immersion`` maps chart points ``(N, n)`` to ``(N, k)``.  ``residual``
    is the relative post-fit error ``max|Delta x - lambda x| / max|lambda x|``;
    ``colinearity`` is the largest relative component of ``Delta x``
    orthogonal to ``x`` (the mean curvature inside the sphere).
    """
    X = np.atleast_2d(np.asarray(samples, float))
    x, lap = laplace_beltrami(chart, immersion, X, h)
    xx = float(np.sum(x * x))
    if xx <= cond_tol * x.size:
        raise CertificationError("immersion vanishes on the samples; the eigenvalue fit is ill-conditioned")
    lam = float(np.sum(lap * x) / xx)
    scale = np.max(np.abs(lam * x))
    residual = float(np.max(np.abs(lap - lam * x)) / scale) if scale > 0 else np.inf
    xn = x / np.linalg.norm(x, axis=1, keepdims=True)
    orth = lap - np.sum(lap * xn, axis=1, keepdims=True) * xn
    colin = float(np.max(np.linalg.norm(orth, axis=1) / np.maximum(np.linalg.norm(lap, axis=1), 1e-300)))
    R = induced_ratio(immersion, chart, X)
    diag = np.trace(R, axis1=1, axis2=2) / chart.dim
    c = float(np.mean(diag))
    off = R - diag[:, None, None] * np.eye(chart.dim)
    cv = float(max(np.std(diag), np.max(np.abs(off))) / abs(c))
    lam_ind = lam / c
    radius = float(np.sqrt(chart.dim / lam_ind)) if lam_ind > 0 else float("nan")
    sphere_r = float(np.mean(np.linalg.norm(x, axis=1)))
    return TakahashiReport(lam, residual, colin, c, cv, lam_ind, radius, sphere_r, abs(radius - sphere_r))


def eigenmap(
    basis: list[Callable], chart: MetricChart, samples, eig_tol: float = 1e-4, cv_tol: float = 1e-6
) -> Callable:
    """Stack eigenfunctions into a map rescaled to be isometric for ``g``.

    Every function must satisfy ``Delta f = lambda f`` with one shared
    nonzero ``lambda``; the induced metric must be a constant multiple ``c g``
    and the returned map is the stack divided by ``sqrt(c)``.
    """
    X = np.atleast_2d(np.asarray(samples, float))
    lams = []
    for f in basis:
        vec = lambda P, f=f: np.asarray(f(P), float)[:, None]  # noqa: E731
        val, lap = laplace_beltrami(chart, vec, X)
        nn = float(np.sum(val * val))
        if nn == 0:
            raise CertificationError("basis function vanishes on the samples")
        lam = float(np.sum(lap * val) / nn)
        if np.max(np.abs(lap - lam * val)) > eig_tol * max(1.0, abs(lam)) * np.max(np.abs(val)):
            raise CertificationError("mixed eigenvalues: a basis function is not a Laplace eigenfunction")
        lams.append(lam)
    lams = np.array(lams)
    if np.ptp(lams) > eig_tol * max(1.0, np.max(np.abs(lams))):
        raise CertificationError(f"mixed eigenvalues across the basis: {lams}")
    if abs(lams.mean()) < eig_tol:
        raise CertificationError("eigenvalue zero: constants do not immerse")

    def stacked(P):
        return np.column_stack([np.asarray(f(P), float) for f in basis])

    R = induced_ratio(stacked, chart, X)
    diag = np.trace(R, axis1=1, axis2=2) / chart.dim
    c = float(np.mean(diag))
    off = R - diag[:, None, None] * np.eye(chart.dim)
    if max(np.std(diag), np.max(np.abs(off))) > cv_tol * abs(c):
        raise CertificationError("pullback is not a constant multiple of the chart metric")
    s = 1.0 / np.sqrt(c)

    def immersion(P):
        return s * stacked(P)

    return immersion


def s2_chart() -> MetricChart:
    return round_sphere(2)


def sphere_identity(X) -> np.ndarray:
    """Inverse stereographic projection onto the unit sphere of ``R^3``."""
    X = np.asarray(X, float)
    s = np.sum(X * X, axis=-1)
    return np.column_stack([2 * X[..., 0], 2 * X[..., 1], s - 1]) / (1 + s)[:, None]


def torus_chart() -> MetricChart:
    return flat_torus(2 * np.pi, n=2)


def clifford_torus(X) -> np.ndarray:
    """``(cos u, sin u, cos v, sin v) / sqrt(2)`` on the flat square torus of side 2 pi."""
    X = np.asarray(X, float)
    u, v = X[..., 0], X[..., 1]
    return np.column_stack([np.cos(u), np.sin(u), np.cos(v), np.sin(v)]) / np.sqrt(2)
