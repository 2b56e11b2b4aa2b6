"""Stability radii of minimal patches from Dirichlet Jacobi eigenvalues."""

from __future__ import annotations

import numpy as np

from ..spectra_lab.jacobi import assemble_jacobi, spectrum
from ..surface_core.patches import ParametricPatch
from .regions import ball_region

__all__ = ["STABLE_TOL", "region_first_eigenvalue", "is_stable", "stability_radius"]

STABLE_TOL = 1e-9


def region_first_eigenvalue(patch: ParametricPatch, p, rho: float, center=None, n_radial: int = 24, n_outer: int = 48) -> float:
    """First Dirichlet Jacobi eigenvalue on ``Sigma n B(p, rho)`` (inf if empty)."""
    reg = ball_region(patch, p, rho, center)
    if reg.mode == "empty":
        return np.inf
    mesh = reg.mesh(n_radial, n_outer)
    return spectrum(assemble_jacobi(patch, mesh), 1).first


def is_stable(patch, p, rho, center=None, **kw) -> bool:
    return region_first_eigenvalue(patch, p, rho, center, **kw) > STABLE_TOL


def stability_radius(patch: ParametricPatch, p, r_cap: float, center=None, rtol: float = 1e-3, **kw) -> float:
    """Largest ``rho <= r_cap`` whose ball region is stable, by bisection.

    Stability shrinks with the domain, so the stable radii form an interval
    starting at zero and bisection on the stable/unstable verdict applies.
    """
    if is_stable(patch, p, r_cap, center, **kw):
        return float(r_cap)
    lo, hi = 0.0, float(r_cap)
    while hi - lo > rtol * r_cap:
        mid = 0.5 * (lo + hi)
        if mid > 0 and is_stable(patch, p, mid, center, **kw):
            lo = mid
        else:
            hi = mid
    return lo
