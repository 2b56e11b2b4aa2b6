"""The Jacobi (second variation of area) operator on meshed patches."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq

from ..surface_core.mesh import TriangleMesh, mixed_areas, stiffness_matrix, triangulate
from ..surface_core.patches import DegenerateImmersionError, ParametricPatch, evaluate_forms
from .report import SpectralReport, generalized_spectrum

__all__ = [
    "AssemblyError",
    "JacobiOperator",
    "vertex_a2",
    "assemble_jacobi",
    "spectrum",
    "jacobi_first_eigenvalue",
    "index_transition",
]


class AssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class JacobiOperator:
    """``L = K - M diag(|A|^2 + ric)`` restricted to the free vertices.

    ``matrix`` is the restricted symmetric L, ``mass`` the lumped mass of the
    free vertices and ``free`` their indices in the mesh.
    """

    matrix: sp.csr_matrix
    mass: np.ndarray
    potential: np.ndarray
    free: np.ndarray
    mesh: TriangleMesh

    @property
    def size(self) -> int:
        return len(self.free)


def vertex_a2(patch: ParametricPatch, mesh: TriangleMesh) -> np.ndarray:
    """``|A|^2`` from the patch at each vertex's parameters.

    Vertices on a coordinate singularity (a collapsed pole or center) are
    evaluated a hair toward the middle of the parameter domain.
    """
    if mesh.params is None:
        raise AssemblyError("mesh carries no parameters")
    P = mesh.params
    u0, u1, v0, v1 = patch.domain
    center = np.array([(u0 + u1) / 2, (v0 + v1) / 2])
    out = np.empty(len(P))
    for i, (u, v) in enumerate(P):
        q = np.array([u, v])
        for shrink in (0.0, 1e-7, 1e-5):
            try:
                out[i] = float(evaluate_forms(patch, *(q + shrink * (center - q))).a2)
                break
            except DegenerateImmersionError:
                continue
        else:
            raise AssemblyError(f"cannot evaluate |A|^2 near parameters {q}")
    return out


def assemble_jacobi(patch: ParametricPatch, mesh: TriangleMesh, ambient_ric: float = 0.0) -> JacobiOperator:
    """Assemble the Jacobi operator with Dirichlet conditions on the mesh boundary.

    The stiffness is the cotangent matrix (positive semidefinite) and the mass
    is lumped from mixed vertex areas, so negative eigenvalues of the
    generalized problem signal instability.
    """
    K = stiffness_matrix(mesh)
    M = mixed_areas(mesh)
    V = vertex_a2(patch, mesh) + ambient_ric
    free = np.flatnonzero(~mesh.boundary)
    if len(free) == 0:
        raise AssemblyError("no free vertices")
    L = (K - sp.diags(M * V)).tocsr()[free][:, free]
    asym = abs(L - L.T).max() if L.nnz else 0.0
    if asym > 1e-12:
        raise AssemblyError(f"assembled operator asymmetric by {asym:.2e}")
    return JacobiOperator(L, M[free], V, free, mesh)


def spectrum(op: JacobiOperator, k: int = 6) -> SpectralReport:
    """``k`` smallest eigenvalues of ``L x = lam M x``."""
    k = min(k, op.size)
    sigma = -float(np.max(op.potential[op.free], initial=0.0)) - 1.0
    return generalized_spectrum(op.matrix, op.mass, k, sigma=sigma)


def jacobi_first_eigenvalue(patch: ParametricPatch, nu: int, nv: int) -> float:
    wrap_u, wrap_v = patch.periodic
    mesh = triangulate(patch, nu, nv, wrap_u, wrap_v)
    return spectrum(assemble_jacobi(patch, mesh), 1).first


def index_transition(factory, lo: float, hi: float, nu: int = 48, nv: int = 48, xtol: float = 1e-4) -> float:
    """Parameter where the first Jacobi eigenvalue of ``factory(a)`` crosses zero.

    ``lo`` and ``hi`` must bracket a sign change (stable at ``lo``).
    """
    f = lambda a: jacobi_first_eigenvalue(factory(a), nu, nv)  # noqa: E731
    flo, fhi = f(lo), f(hi)
    if not (flo > 0 > fhi):
        raise ValueError(f"no stability change in [{lo}, {hi}]: lambda_1 = {flo:.3g}, {fhi:.3g}")
    return float(brentq(f, lo, hi, xtol=xtol))
