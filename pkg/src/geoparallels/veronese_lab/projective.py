"""Projective points, the degree-2 Veronese map, its unit lift and the Hopf projection.

Hermitian products are conjugate-linear in the first slot,
``<a, b> = sum(conj(a) * b)``; the real inner product on ``C^k = R^2k`` is
its real part.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "ProjectiveError",
    "ProjPoint",
    "random_points",
    "monomials",
    "veronese",
    "veronese_lift",
    "lift_differential",
    "hopf_project",
    "fiber_pairing",
    "horizontality_residual",
    "SpanProbe",
    "span_rank_probe",
    "projector_span_probe",
]

# sqrt(2) on the mixed monomials makes |m(z)| = |z|^2 (the symmetric-tensor norm)
_MIXED = np.array([False, True, True, False, True, False])
_WEIGHTS = np.where(_MIXED, np.sqrt(2.0), 1.0)
_PAIRS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))


class ProjectiveError(ValueError):
    pass


def _canonical(z: np.ndarray, tol: float = 0.0) -> np.ndarray:
    z = np.asarray(z, complex)
    norm = np.linalg.norm(z)
    if not norm > 0 or not np.all(np.isfinite(z)):
        raise ProjectiveError("the zero vector has no projective class")
    z = z / norm
    lead = np.flatnonzero(np.abs(z) > tol)[0]
    return z * (abs(z[lead]) / z[lead])


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A point of ``CP^k`` stored by its canonical representative.

    The representative has unit norm and its first nonzero coordinate real
    positive, so rescaling the input by any nonzero complex number gives the
    same stored vector.
    """

    coords: np.ndarray

    def __init__(self, z):
        object.__setattr__(self, "coords", _canonical(z))

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def isclose(self, other: "ProjPoint", atol: float = 1e-12) -> bool:
        """Equality of classes: ``|<a, b>| = 1`` up to ``atol``."""
        return bool(abs(1.0 - abs(np.vdot(self.coords, other.coords))) <= atol)

    def chart(self) -> np.ndarray:
        """Real affine coordinates ``(x1, y1, x2, y2, ...)`` of ``[1 : z1 : z2 : ...]``."""
        z = self.coords
        if abs(z[0]) < 1e-14:
            raise ProjectiveError("point lies on the hyperplane at infinity of the affine chart")
        w = z[1:] / z[0]
        return np.column_stack([w.real, w.imag]).ravel()

    @classmethod
    def from_chart(cls, X) -> "ProjPoint":
        X = np.asarray(X, float)
        return cls(np.concatenate([[1.0], X[0::2] + 1j * X[1::2]]))


def random_points(count: int, rng: np.random.Generator, k: int = 2) -> list[ProjPoint]:
    """Unitarily invariant random points of ``CP^k`` (Gaussian vectors)."""
    Z = rng.standard_normal((count, k + 1)) + 1j * rng.standard_normal((count, k + 1))
    return [ProjPoint(z) for z in Z]


def monomials(z, weighted: bool = False) -> np.ndarray:
    """``(x^2, xy, xz, y^2, yz, z^2)`` of a vector ``(x, y, z)``; optionally sqrt(2)-weighted."""
    z = np.asarray(z, complex)
    m = np.array([z[i] * z[j] for i, j in _PAIRS])
    return m * _WEIGHTS if weighted else m


def _monomial_differential(z, dz, weighted: bool = False) -> np.ndarray:
    dm = np.array([dz[i] * z[j] + z[i] * dz[j] for i, j in _PAIRS])
    return dm * _WEIGHTS if weighted else dm


def veronese(p: ProjPoint, weighted: bool = False) -> ProjPoint:
    """The class ``[x^2 : xy : xz : y^2 : yz : z^2]`` in ``CP^5``."""
    return ProjPoint(monomials(p.coords, weighted))


def veronese_lift(p: ProjPoint | np.ndarray, weighted: bool = False) -> np.ndarray:
    """Unit vector in ``C^6``: the monomials of the given coordinates over their norm.

    A ``ProjPoint`` is lifted through its canonical representative; a raw
    coordinate vector is lifted as given, so multiplying it by ``e^{i t}``
    multiplies the output by ``e^{2 i t}``.
    """
    z = p.coords if isinstance(p, ProjPoint) else np.asarray(p, complex)
    m = monomials(z, weighted)
    return m / np.linalg.norm(m)


def _representative_tangent(p: ProjPoint, v, representative: str):
    """A representative vector of ``p`` and its velocity along the chart direction ``v``."""
    v = np.asarray(v, float)
    Z = np.concatenate([[1.0], p.coords[1:] / p.coords[0]]) if abs(p.coords[0]) > 1e-14 else None
    if Z is None:
        raise ProjectiveError("point lies on the hyperplane at infinity of the affine chart")
    dZ = np.concatenate([[0.0], v[0::2] + 1j * v[1::2]])
    if representative == "chart":
        return Z, dZ
    if representative != "horizontal":
        raise ValueError(f"unknown representative {representative!r}")
    s = np.linalg.norm(Z)
    u = Z / s
    du = dZ / s - u * (np.vdot(u, dZ).real / s)
    # drop the fiber component so the curve of representatives is horizontal in S^5
    du = du - 1j * u * np.vdot(u, du).imag
    return u, du


def lift_differential(p: ProjPoint, v, weighted: bool = False, representative: str = "chart"):
    """``(L, dL)``: the unit lift and its derivative along the chart direction ``v``.

    ``representative`` picks the curve of homogeneous coordinates that is
    lifted: the affine chart ``(1, z1, z2)`` or its horizontal unit
    normalization.
    """
    Z, dZ = _representative_tangent(p, v, representative)
    m = monomials(Z, weighted)
    dm = _monomial_differential(Z, dZ, weighted)
    nm = np.linalg.norm(m)
    L = m / nm
    dL = dm / nm - L * (np.vdot(L, dm).real / nm)
    return L, dL


def hopf_project(w) -> ProjPoint:
    """The class ``[w]`` of a unit vector."""
    w = np.asarray(w, complex)
    if abs(np.linalg.norm(w) - 1.0) > 1e-10:
        raise ProjectiveError("hopf_project expects a unit vector")
    return ProjPoint(w)


def fiber_pairing(w, xi) -> float:
    """``|Re<xi, i w>| / |xi|``: the normalized fiber component of ``xi`` at ``w``."""
    w = np.asarray(w, complex)
    xi = np.asarray(xi, complex)
    nx = np.linalg.norm(xi)
    if nx == 0:
        return 0.0
    return float(abs(np.vdot(xi, 1j * w).real) / nx)


def horizontality_residual(
    p: ProjPoint, v, weighted: bool = False, representative: str = "chart"
) -> float:
    """Normalized fiber component of the lift's differential along ``v``."""
    L, dL = lift_differential(p, v, weighted, representative)
    return fiber_pairing(L, dL)


class SpanProbe(NamedTuple):
    rank: int
    singular_values: np.ndarray
    gap: float
    affine_rank: int


def _rank(M: np.ndarray, tol: float):
    s = np.linalg.svd(M, compute_uv=False)
    r = int(np.sum(s > tol * s[0]))
    gap = float(s[r - 1] / s[r]) if r < len(s) and s[r] > 0 else np.inf
    return r, s, gap


def span_rank_probe(
    samples: int,
    rng: np.random.Generator,
    tol: float = 1e-8,
    weighted: bool = False,
    representative: str = "random",
) -> SpanProbe:
    """Numerical rank of the real span of lift images in ``R^12``.

    Rows are ``(Re L, Im L)``.  With ``representative="random"`` each point is
    lifted through a Gaussian representative (generic phase); ``"canonical"``
    uses the canonical representative, whose first lift coordinate is real.
    ``gap`` is the ratio of the last retained to the first dropped singular
    value.
    """
    if samples < 12:
        raise ValueError("need at least 12 samples")
    Z = rng.standard_normal((samples, 3)) + 1j * rng.standard_normal((samples, 3))
    if representative == "canonical":
        Z = np.array([ProjPoint(z).coords for z in Z])
    elif representative != "random":
        raise ValueError(f"unknown representative {representative!r}")
    L = np.array([veronese_lift(z, weighted) for z in Z])
    M = np.hstack([L.real, L.imag])
    r, s, gap = _rank(M, tol)
    ra, _, _ = _rank(M - M.mean(axis=0), tol)
    return SpanProbe(r, s, gap, ra)


def projector_span_probe(samples: int, rng: np.random.Generator, tol: float = 1e-8) -> SpanProbe:
    """Rank of the rank-one projectors ``z z*`` in the 9-dimensional Hermitian space."""
    from .immersion import hermitian_coordinates

    P = np.array([np.outer(p.coords, p.coords.conj()) for p in random_points(samples, rng)])
    M = hermitian_coordinates(P)
    r, s, gap = _rank(M, tol)
    ra, _, _ = _rank(M - M.mean(axis=0), tol)
    return SpanProbe(r, s, gap, ra)
