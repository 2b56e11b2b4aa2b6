"""The trace-free projector immersion of ``CP^2`` into ``S^7`` and metric pullbacks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..chart_lab.charts import MetricChart, fubini_study
from .projective import ProjPoint, _monomial_differential, monomials

__all__ = [
    "HERMITIAN_BASIS",
    "HermitianTraceless3",
    "hermitian_coordinates",
    "fs_chart",
    "projector_immersion",
    "projector_map",
    "projector_pullback",
    "pullback_ratio",
    "veronese_fs_pullback",
]

PROJECTOR_SCALE = np.sqrt(1.5)


def _hermitian_basis() -> np.ndarray:
    """Frobenius-orthonormal Hermitian 3x3 basis: 8 trace-free elements, then I/sqrt(3)."""
    B = []
    for i in range(3):
        for j in range(i + 1, 3):
            S = np.zeros((3, 3), complex)
            S[i, j] = S[j, i] = 1 / np.sqrt(2)
            A = np.zeros((3, 3), complex)
            A[i, j], A[j, i] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            B += [S, A]
    B.append(np.diag([1.0, -1.0, 0.0]).astype(complex) / np.sqrt(2))
    B.append(np.diag([1.0, 1.0, -2.0]).astype(complex) / np.sqrt(6))
    B.append(np.eye(3, dtype=complex) / np.sqrt(3))
    return np.array(B)


HERMITIAN_BASIS = _hermitian_basis()


def hermitian_coordinates(H, traceless: bool = False) -> np.ndarray:
    """Coordinates ``Re tr(B_k H)`` of Hermitian matrices ``(..., 3, 3)`` in the fixed basis."""
    basis = HERMITIAN_BASIS[:8] if traceless else HERMITIAN_BASIS
    return np.einsum("kab,...ba->...k", basis, np.asarray(H, complex)).real


@dataclass(frozen=True)
class HermitianTraceless3:
    """A trace-free Hermitian 3x3 matrix with its 8 real basis coordinates."""

    matrix: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrix, complex)
        if M.shape != (3, 3):
            raise ValueError("expected a 3x3 matrix")
        if np.max(np.abs(M - M.conj().T)) > 1e-12:
            raise ValueError("matrix is not Hermitian")
        if abs(np.trace(M)) > 1e-12:
            raise ValueError("matrix is not trace-free")
        object.__setattr__(self, "matrix", M)

    @property
    def coords(self) -> np.ndarray:
        return hermitian_coordinates(self.matrix, traceless=True)

    @classmethod
    def from_coords(cls, c) -> "HermitianTraceless3":
        return cls(np.tensordot(np.asarray(c, float), HERMITIAN_BASIS[:8], axes=1))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


def fs_chart() -> MetricChart:
    """Affine chart of ``CP^2`` with the Fubini-Study metric (identity at the origin)."""
    return fubini_study()


def _projector(Z) -> np.ndarray:
    Z = np.asarray(Z, complex)
    s = np.sum(np.abs(Z) ** 2, axis=-1)
    return Z[..., :, None] * Z[..., None, :].conj() / s[..., None, None] - np.eye(3) / 3


def projector_immersion(p: ProjPoint) -> HermitianTraceless3:
    """``sqrt(3/2) (z z* / |z|^2 - I/3)``, a unit vector of the trace-free Hermitian space."""
    return HermitianTraceless3(PROJECTOR_SCALE * _projector(p.coords))


def _chart_vectors(X) -> np.ndarray:
    X = np.asarray(X, float)
    Z = np.empty(X.shape[:-1] + (3,), complex)
    Z[..., 0] = 1.0
    Z[..., 1:] = X[..., 0::2] + 1j * X[..., 1::2]
    return Z


def projector_map(X) -> np.ndarray:
    """Vectorized projector immersion on affine chart points ``(N, 4) -> (N, 8)``."""
    return PROJECTOR_SCALE * hermitian_coordinates(_projector(_chart_vectors(X)), traceless=True)


def _projector_differential(Z, dZ) -> np.ndarray:
    s = np.vdot(Z, Z).real
    ds = 2 * np.vdot(Z, dZ).real
    return (np.outer(dZ, Z.conj()) + np.outer(Z, dZ.conj())) / s - np.outer(Z, Z.conj()) * ds / s**2


def projector_pullback(p: ProjPoint) -> np.ndarray:
    """Induced metric of the unit projector immersion in the affine chart (4x4)."""
    Z = _chart_vectors(p.chart())
    D = []
    for a in range(4):
        dZ = np.zeros(3, complex)
        dZ[1 + a // 2] = 1.0 if a % 2 == 0 else 1j
        D.append(PROJECTOR_SCALE * hermitian_coordinates(_projector_differential(Z, dZ), traceless=True))
    D = np.array(D)
    return D @ D.T


def pullback_ratio(p: ProjPoint, v, w, tol: float = 1e-12) -> float:
    """``<dx(v), dx(w)> / g_FS(v, w)``; NaN when ``g_FS(v, w)`` vanishes."""
    v = np.asarray(v, float)
    w = np.asarray(w, float)
    X = p.chart()
    g = fubini_study().metric(X[None])[0]
    den = v @ g @ w
    if abs(den) <= tol * np.sqrt((v @ g @ v) * (w @ g @ w)):
        return float("nan")
    return float(v @ projector_pullback(p) @ w / den)


def veronese_fs_pullback(p: ProjPoint, weighted: bool = False) -> np.ndarray:
    """Pullback of the ``CP^5`` Fubini-Study metric under the Veronese map, in the affine chart."""
    Z = _chart_vectors(p.chart())
    f = monomials(Z, weighted)
    nf2 = np.vdot(f, f).real
    D = []
    for a in range(4):
        dZ = np.zeros(3, complex)
        dZ[1 + a // 2] = 1.0 if a % 2 == 0 else 1j
        D.append(_monomial_differential(Z, dZ, weighted))
    D = np.array(D)
    herm = (D.conj() @ D.T) / nf2 - np.outer(D.conj() @ f, f.conj() @ D.T) / nf2**2
    return herm.real
