"""Finite-difference curvature oracle for coordinate charts.

All tensors use coordinate components.  The (0,4) Riemann tensor follows
``R(X, Y, X, Y) = K(X, Y) |X ^ Y|^2`` so round spheres have positive
sectional curvature; ``Ric_jl = g^ik R_ijkl``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from .charts import ChartError, MetricChart

__all__ = [
    "CurvatureError",
    "CurvaturePack",
    "fd_derivatives",
    "metric_jet",
    "christoffel",
    "christoffel_and_derivative",
    "curvature_batch",
    "curvature_at",
    "EinsteinCheck",
    "einstein_residual",
    "nabla_rm_norm",
    "sectional_curvature",
    "laplace_beltrami",
]


class CurvatureError(ValueError):
    pass


def _symmetric(half, center=None):
    """Central stencil from its positive-offset coefficients."""
    odd = center is None
    out = {a: c for a, c in enumerate(half, start=1)}
    out.update({-a: (-c if odd else c) for a, c in enumerate(half, start=1)})
    if not odd:
        out[0] = center
    return out


_D1 = {
    2: _symmetric([1 / 2]),
    4: _symmetric([8 / 12, -1 / 12]),
    6: _symmetric([3 / 4, -3 / 20, 1 / 60]),
    8: _symmetric([4 / 5, -1 / 5, 4 / 105, -1 / 280]),
}
_D2 = {
    2: _symmetric([1.0], -2.0),
    4: _symmetric([16 / 12, -1 / 12], -30 / 12),
    6: _symmetric([3 / 2, -3 / 20, 1 / 90], -49 / 18),
    8: _symmetric([8 / 5, -1 / 5, 8 / 315, -1 / 560], -205 / 72),
}


@lru_cache(maxsize=None)
def _stencil(n: int, order: int, second: bool):
    """Offsets (in units of h) and weight matrices for the derivative jet.

    Returns ``(pts, W1, W2, pairs)``: ``W1 @ F`` gives the first derivatives
    along each axis and ``W2 @ F`` the second derivatives for ``pairs``
    ``(k, l)`` with ``k <= l``, before division by the steps.
    """
    offsets: dict[tuple, int] = {}

    def key(vec):
        t = tuple(int(c) for c in vec)
        if t not in offsets:
            offsets[t] = len(offsets)
        return offsets[t]

    key(np.zeros(n))
    d1 = []
    for k in range(n):
        row = []
        for a, c in _D1[order].items():
            e = np.zeros(n)
            e[k] = a
            row.append((key(e), c))
        d1.append(row)
    d2 = []
    pairs = []
    if second:
        for k in range(n):
            for l in range(k, n):
                terms = []
                if k == l:
                    for a, c in _D2[order].items():
                        e = np.zeros(n)
                        e[k] = a
                        terms.append((key(e), c))
                else:
                    # second differences along e_k + e_l and e_k - e_l differ by 4 d_k d_l
                    for sgn in (1, -1):
                        for a, c in _D2[order].items():
                            if a:
                                e = np.zeros(n)
                                e[k], e[l] = a, sgn * a
                                terms.append((key(e), sgn * c / 4))
                d2.append(terms)
                pairs.append((k, l))
    pts = np.zeros((len(offsets), n))
    for t, i in offsets.items():
        pts[i] = t

    def matrix(rows):
        W = np.zeros((len(rows), len(offsets)))
        for r, terms in enumerate(rows):
            for i, c in terms:
                W[r, i] += c
        return W

    return pts, matrix(d1), matrix(d2), tuple(pairs)


def fd_derivatives(fun: Callable, X, h, order: int = 2, second: bool = True):
    """Value, gradient and Hessian of a vectorized function by central differences.

    ``fun`` maps ``(N, n)`` points to ``(N, *shape)``.  ``h`` is a scalar,
    one step per point ``(N,)`` or one step per point and axis ``(N, n)``.
    Returns ``(f, df, ddf)`` with ``df[:, k]`` and ``ddf[:, k, l]`` prepended
    to the value shape.
    """
    X = np.atleast_2d(np.asarray(X, float))
    N, n = X.shape
    h = np.asarray(h, float)
    h = np.broadcast_to(h[:, None] if h.ndim == 1 else h, (N, n))
    offs, W1, W2, pairs = _stencil(n, order, second)
    P = X[:, None, :] + h[:, None, :] * offs[None, :, :]
    F = fun(P.reshape(-1, n))
    F = F.reshape((N, len(offs)) + F.shape[1:])
    f0 = F[:, 0]
    # stencil weights sum to zero; centering makes constants differentiate to exactly 0
    F = (F - f0[:, None]).reshape(N, len(offs), -1)
    hk = h.reshape((N, n) + (1,) * (f0.ndim - 1))
    df = (W1 @ F).reshape((N, n) + f0.shape[1:]) / hk
    if not second:
        return f0, df, None
    D2 = (W2 @ F).reshape((N, len(pairs)) + f0.shape[1:])
    ddf = np.empty((N, n, n) + f0.shape[1:])
    for p, (k, l) in enumerate(pairs):
        val = D2[:, p] / (hk[:, k] * hk[:, l])
        ddf[:, k, l] = val
        ddf[:, l, k] = val
    return f0, df, ddf


def metric_jet(chart: MetricChart, X, h=None, order: int = 2, second=True):
    """Metric and its first (and second) coordinate derivatives at points X."""
    h = chart.fd_step if h is None else h
    return fd_derivatives(chart.metric, X, h, order, second)


def _gamma_first_kind(dg):
    # dg[..., k, i, j] = d_k g_ij ; returns G[..., m, j, k] = Gamma_{m j k}
    return 0.5 * (
        np.einsum("...jmk->...mjk", dg) + np.einsum("...kmj->...mjk", dg) - np.einsum("...mjk->...mjk", dg)
    )


def christoffel(g, dg):
    ginv = np.linalg.inv(g)
    return np.einsum("...im,...mjk->...ijk", ginv, _gamma_first_kind(dg))


def christoffel_and_derivative(g, dg, ddg):
    """Gamma^i_jk and d_l Gamma^i_jk (index order ``[..., l, i, j, k]``)."""
    ginv = np.linalg.inv(g)
    G1 = _gamma_first_kind(dg)
    # d_l Gamma_{mjk}
    dG1 = 0.5 * (
        np.einsum("...ljmk->...lmjk", ddg) + np.einsum("...lkmj->...lmjk", ddg) - ddg
    )
    sh = G1.shape
    n = sh[-1]
    G1f = G1.reshape(sh[:-2] + (n * n,))
    dginv = -(ginv[..., None, :, :] @ dg @ ginv[..., None, :, :])
    Gam = (ginv @ G1f).reshape(sh)
    dGam = (dginv @ G1f[..., None, :, :] + ginv[..., None, :, :] @ dG1.reshape(dG1.shape[:-2] + (n * n,)))
    dGam = dGam.reshape(dG1.shape)
    return Gam, dGam


@dataclass(frozen=True)
class CurvaturePack:
    metric: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray
    rm_norm2: np.ndarray
    bianchi_residual: np.ndarray
    symmetry_residual: np.ndarray


def _raise_all(T, ginv):
    """Raise every index of a covariant tensor with batch axis 0."""
    k = T.ndim - 1
    G = ginv.reshape(ginv.shape[:1] + (1,) * (k - 2) + ginv.shape[1:])
    for ax in range(1, k + 1):
        T = np.moveaxis(np.moveaxis(T, ax, -1) @ G, -1, ax)
    return T


def curvature_batch(g, dg, ddg, checks: bool = True) -> CurvaturePack:
    """Curvature tensors at a batch of points from the metric 2-jet.

    Inputs carry a leading batch axis.  With ``checks=False`` the Bianchi and
    symmetry residuals are skipped (returned as NaN).
    """
    N, n = g.shape[0], g.shape[-1]
    ginv = np.linalg.inv(g)
    G1 = _gamma_first_kind(dg)  # [N, m, j, k]
    Gam = (ginv @ G1.reshape(N, n, n * n)).reshape(N, n, n, n)
    # ddg[N, a, b, i, j] = d_a d_b g_ij
    second = 0.5 * (
        ddg.transpose(0, 3, 1, 2, 4)  # d_j d_k g_il -> [i, j, k, l]
        + ddg.transpose(0, 1, 3, 4, 2)  # d_i d_l g_jk
        - ddg.transpose(0, 1, 3, 2, 4)  # d_i d_k g_jl
        - ddg.transpose(0, 3, 1, 4, 2)  # d_j d_l g_ik
    )
    # quadratic part: g_mn (Gam^m_jk Gam^n_il - Gam^m_jl Gam^n_ik)
    Glow = G1.reshape(N, n, n * n)  # Gamma_{m jk}
    Q = (Glow.transpose(0, 2, 1) @ Gam.reshape(N, n, n * n)).reshape(N, n, n, n, n)  # [j,k,i,l]
    quad = Q.transpose(0, 3, 1, 2, 4) - Q.transpose(0, 3, 1, 4, 2)
    Rm = second + quad
    # Ric_jl = g^ik R_ijkl
    Ric = (Rm.transpose(0, 2, 4, 1, 3).reshape(N, n * n, n * n) @ ginv.reshape(N, n * n, 1)).reshape(N, n, n)
    R = np.einsum("njl,njl->n", ginv, Ric)
    norm2 = np.sum(Rm * _raise_all(Rm, ginv), axis=(1, 2, 3, 4))
    if checks:
        bianchi = Rm + Rm.transpose(0, 1, 3, 4, 2) + Rm.transpose(0, 1, 4, 2, 3)
        ax = (1, 2, 3, 4)
        sym = np.maximum.reduce(
            [
                np.abs(Rm + Rm.transpose(0, 2, 1, 3, 4)).max(axis=ax),
                np.abs(Rm + Rm.transpose(0, 1, 2, 4, 3)).max(axis=ax),
                np.abs(Rm - Rm.transpose(0, 3, 4, 1, 2)).max(axis=ax),
            ]
        )
        bres = np.abs(bianchi).max(axis=ax)
    else:
        bres = sym = np.full(N, np.nan)
    return CurvaturePack(g, Gam, Rm, Ric, R, norm2, bres, sym)


def _check_point(chart: MetricChart, x, margin):
    x = np.asarray(x, float)
    if x.shape != (chart.dim,):
        raise ChartError(f"point must have shape ({chart.dim},)")
    if not chart.contains(x, margin):
        raise ChartError(f"{chart.name}: point {x} not interior with margin {margin}")
    return x


def curvature_at(chart: MetricChart, x, h: float | None = None, bianchi_tol: float = 1e-6):
    """Christoffels, Riemann, Ricci, scalar curvature and |Rm|^2 at one point."""
    h = chart.fd_step if h is None else h
    x = _check_point(chart, x, 2 * h)
    g, dg, ddg = metric_jet(chart, x[None], h)
    if np.min(np.linalg.eigvalsh(g[0])) <= 0:
        raise CurvatureError(f"{chart.name}: metric not positive definite at {x}")
    pack = curvature_batch(g, dg, ddg)
    pack = CurvaturePack(*(np.asarray(getattr(pack, f))[0] for f in pack.__dataclass_fields__))
    scale = max(1.0, float(np.abs(pack.riemann).max()))
    if pack.bianchi_residual > bianchi_tol * scale:
        raise CurvatureError(
            f"{chart.name}: first Bianchi residual {pack.bianchi_residual:.2e} at {x}"
        )
    return pack


class EinsteinCheck(NamedTuple):
    lam: float
    residual: float
    normalized: float


def einstein_residual(chart: MetricChart, x, h: float | None = None) -> EinsteinCheck:
    """``lam = R / n`` and the max-entry norm of ``Ric - lam g``.

    ``normalized`` divides by the max-entry norm of g, which makes the
    verdict invariant under constant rescaling of the metric.
    """
    p = curvature_at(chart, x, h)
    lam = float(p.scalar) / chart.dim
    res = float(np.abs(p.ricci - lam * p.metric).max())
    return EinsteinCheck(lam, res, res / float(np.abs(p.metric).max()))


def nabla_rm_norm(chart: MetricChart, x, h: float | None = None) -> float:
    """``|nabla Rm|`` from centered differences of curvature packs."""
    h = chart.fd_step if h is None else h
    x = _check_point(chart, x, 3 * h)
    n = chart.dim
    pts = [x]
    for k in range(n):
        for s in (1, -1):
            e = np.zeros(n)
            e[k] = s * h
            pts.append(x + e)
    g, dg, ddg = metric_jet(chart, np.array(pts), h)
    packs = curvature_batch(g, dg, ddg)
    Rm = packs.riemann
    dRm = np.stack([(Rm[1 + 2 * k] - Rm[2 + 2 * k]) / (2 * h) for k in range(n)])
    Gam = packs.christoffel[0]
    R0 = Rm[0]
    nab = (
        dRm
        - np.einsum("mea,embcd->eabcd", Gam, np.broadcast_to(R0, (n,) + R0.shape))
        - np.einsum("meb,eamcd->eabcd", Gam, np.broadcast_to(R0, (n,) + R0.shape))
        - np.einsum("mec,eabmd->eabcd", Gam, np.broadcast_to(R0, (n,) + R0.shape))
        - np.einsum("med,eabcm->eabcd", Gam, np.broadcast_to(R0, (n,) + R0.shape))
    )
    gi = np.linalg.inv(g[0])
    up = np.einsum("ep,aq,br,cs,dt,pqrst->eabcd", gi, gi, gi, gi, gi, nab)
    return float(np.sqrt(max(np.einsum("eabcd,eabcd->", nab, up), 0.0)))


def sectional_curvature(chart: MetricChart, x, X, Y, h: float | None = None) -> float:
    p = curvature_at(chart, x, h)
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    num = np.einsum("ijkl,i,j,k,l->", p.riemann, X, Y, X, Y)
    g = p.metric
    den = (X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2
    return float(num / den)


def laplace_beltrami(chart: MetricChart, fun: Callable, X, h: float = 1e-2, order: int = 4):
    """Positive Laplace-Beltrami ``-g^ij (d_ij f - Gamma^k_ij d_k f)`` of a vector function.

    ``fun`` maps ``(N, n)`` points to ``(N, m)`` values; returns ``(f, Delta f)``.
    Fourth-order stencils keep the truncation error near ``h^4``.
    """
    X = np.atleast_2d(np.asarray(X, float))
    f, df, ddf = fd_derivatives(fun, X, h, order)
    g, dg, _ = fd_derivatives(chart.metric, X, h, order, second=False)
    Gam = christoffel(g, dg)
    ginv = np.linalg.inv(g)
    hess = ddf - np.einsum("nkij,nkm->nijm", Gam, df)
    return f, -np.einsum("nij,nijm->nm", ginv, hess)
