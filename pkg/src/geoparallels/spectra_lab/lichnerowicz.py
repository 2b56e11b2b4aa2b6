"""Lichnerowicz Laplacian on transverse-traceless tensors over a flat 4-torus.

On a flat torus the curvature term vanishes and the operator is the rough
Laplacian, diagonal in Fourier modes ``h exp(2 pi i k.x / side)`` with
eigenvalue ``(2 pi / side)^2 |k|^2``.  At each mode the admissible
polarizations are the symmetric matrices with zero trace and ``h k = 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .report import SpectralReport, make_report

__all__ = ["TTModeBasis", "sym_basis", "tt_basis", "lichnerowicz_torus_spectrum"]


def sym_basis(n: int = 4) -> np.ndarray:
    """Frobenius-orthonormal basis of symmetric n x n matrices, shape (n(n+1)/2, n, n)."""
    out = []
    for i in range(n):
        for j in range(i, n):
            E = np.zeros((n, n))
            if i == j:
                E[i, i] = 1.0
            else:
                E[i, j] = E[j, i] = 1 / np.sqrt(2)
            out.append(E)
    return np.array(out)


@dataclass(frozen=True)
class TTModeBasis:
    k: tuple
    basis: np.ndarray  # (dim, 4, 4), Frobenius orthonormal

    @property
    def dim(self) -> int:
        return len(self.basis)

    def constraint_residual(self) -> float:
        if self.dim == 0:
            return 0.0
        k = np.asarray(self.k, float)
        tr = np.abs(np.trace(self.basis, axis1=1, axis2=2)).max()
        div = np.abs(self.basis @ k).max()
        return float(max(tr, div))


def tt_basis(k, n: int = 4) -> TTModeBasis:
    """Null space of the trace and divergence constraints at lattice vector k."""
    S = sym_basis(n)
    k = np.asarray(k, float)
    rows = [np.trace(S, axis1=1, axis2=2)]
    if np.any(k):
        rows += list((S @ k).T)
    C = np.array(rows)
    N = null_space(C)
    basis = np.einsum("ad,aij->dij", N, S)
    return TTModeBasis(tuple(int(c) for c in k), basis)


def lichnerowicz_torus_spectrum(side: float = 1.0, mode_cutoff: int = 1):
    """Spectrum over all modes with ``max |k_i| <= mode_cutoff``.

    Returns ``(report, bases)``: eigenvalues repeated by TT multiplicity and
    the per-mode polarization bases.
    """
    if side <= 0 or mode_cutoff < 1:
        raise ValueError("side > 0 and mode_cutoff >= 1 required")
    rng = range(-mode_cutoff, mode_cutoff + 1)
    bases = []
    ev = []
    for k in itertools.product(rng, repeat=4):
        b = tt_basis(k)
        bases.append(b)
        lam = (2 * np.pi / side) ** 2 * float(np.dot(k, k))
        ev += [lam] * b.dim
    report: SpectralReport = make_report(ev, 1e-9 * max(ev))
    return report, bases
