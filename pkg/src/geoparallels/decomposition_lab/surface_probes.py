"""Monotonicity, curvature-concentration and Simons diagnostics on minimal patches."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..chart_lab.curvature import christoffel, fd_derivatives
from ..profiles import Profile, monotonicity
from ..surface_core.patches import ParametricPatch, evaluate_forms
from .regions import ball_region

__all__ = [
    "NonMinimalPatchError",
    "area_ratio_profile",
    "ChoiSchoenProbe",
    "choi_schoen_probe",
    "simons_residual",
]


class NonMinimalPatchError(ValueError):
    pass


def _a2(patch):
    return lambda U, V: evaluate_forms(patch, U, V).a2


def area_ratio_profile(patch: ParametricPatch, p, radii, center=None, rtol: float = 1e-9) -> Profile:
    """``Area(Sigma n B(p, r)) / (pi r^2)`` at ascending radii with a monotonicity verdict."""
    radii = np.asarray(radii, float)
    if np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be strictly ascending")
    vals = np.array([ball_region(patch, p, r, center).integrate() / (np.pi * r * r) for r in radii])
    return Profile(radii, vals, monotonicity(vals, rtol * np.max(np.abs(vals))))


class ChoiSchoenProbe(NamedTuple):
    energy: float
    peak: float


def choi_schoen_probe(patch: ParametricPatch, p, r: float, center=None) -> ChoiSchoenProbe:
    """``int_{B(p,r)} |A|^2`` and ``sup_{B(p,r/2)} |A|^2 (r/2)^2``.

    ``r = inf`` integrates over the whole patch; the peak then uses the
    whole patch as well.
    """
    f = _a2(patch)
    energy = ball_region(patch, p, r, center).integrate(f)
    half = ball_region(patch, p, r / 2, center)
    rad2 = 1.0 if np.isinf(r) else (r / 2) ** 2
    return ChoiSchoenProbe(energy, half.max_over(f) * rad2)


def _jets(patch: ParametricPatch, uv, h):
    """Metric, second form and |A|^2 with parameter derivatives at points uv (N, 2)."""

    def fields(Q):
        xu, xv = patch.first_derivatives(Q[:, 0], Q[:, 1])
        ff = evaluate_forms(patch, Q[:, 0], Q[:, 1])
        g = np.stack([np.stack([ff.E, ff.F], -1), np.stack([ff.F, ff.G], -1)], -2)
        b = np.stack([np.stack([ff.e, ff.f], -1), np.stack([ff.f, ff.g], -1)], -2)
        return np.concatenate([g.reshape(-1, 4), b.reshape(-1, 4), ff.a2[:, None], ff.H[:, None]], axis=1)

    f, df, ddf = fd_derivatives(fields, uv, h, order=4)
    g, b = f[:, :4].reshape(-1, 2, 2), f[:, 4:8].reshape(-1, 2, 2)
    dg, db = df[:, :, :4].reshape(-1, 2, 2, 2), df[:, :, 4:8].reshape(-1, 2, 2, 2)
    return g, dg, b, db, f[:, 8], df[:, :, 8], ddf[:, :, :, 8], f[:, 9]


def simons_residual(patch: ParametricPatch, samples, h: float = 1e-3, h_tol: float = 1e-8) -> float:
    """Max of ``|1/2 Lap |A|^2 - |nabla A|^2 + |A|^4|`` at parameter samples.

    ``Lap`` is the surface div-grad Laplacian; derivatives of the analytic
    forms are taken by fourth-order differences with step ``h`` (scaled by
    the parameter spans).  Samples must lie on a minimal part of the patch.
    """
    uv = np.atleast_2d(np.asarray(samples, float))
    step = h * min(patch.spans)
    g, dg, b, db, a2, da2, dda2, H = _jets(patch, uv, step)
    if np.max(np.abs(H)) > h_tol:
        raise NonMinimalPatchError(f"{patch.name}: |H| = {np.max(np.abs(H)):.2e} at samples")
    gi = np.linalg.inv(g)
    Gam = christoffel(g, dg)  # Gam[n, i, j, k]
    lap = np.einsum("nij,nij->n", gi, dda2 - np.einsum("nkij,nk->nij", Gam, da2))
    # (nabla_k b)_ij = d_k b_ij - Gam^m_ki b_mj - Gam^m_kj b_im
    nb = db - np.einsum("nmki,nmj->nkij", Gam, b) - np.einsum("nmkj,nim->nkij", Gam, b)
    nb2 = np.einsum("nka,nib,njc,nkij,nabc->n", gi, gi, gi, nb, nb, optimize=True)
    return float(np.max(np.abs(0.5 * lap - nb2 + a2**2)))
