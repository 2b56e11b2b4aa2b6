"""Oriented triangle meshes and cotangent-weight discrete curvature."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .patches import ParametricPatch

__all__ = [
    "MeshError",
    "DegenerateTriangleError",
    "NonOrientableMeshError",
    "TriangleMesh",
    "triangulate",
    "icosphere",
    "voxel_surface",
    "genus2_mesh",
    "mesh_area",
    "triangle_areas",
    "cotangent_weights",
    "stiffness_matrix",
    "mixed_areas",
    "vertex_normals",
    "MeanCurvature",
    "mesh_mean_curvature",
    "angle_defects",
    "mesh_gaussian_curvature",
    "cotan_laplacian_positions",
    "ConvergenceLadder",
    "sphere_curvature_ladder",
]

AREA_FLOOR = 1e-14


class MeshError(ValueError):
    pass


class DegenerateTriangleError(MeshError):
    pass


class NonOrientableMeshError(MeshError):
    pass


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TriangleMesh:
    """Immutable oriented simplicial surface.

    ``params`` optionally carries the (u, v) parameters each vertex was
    sampled from, which lets analytic patch quantities be attached later.
    ``area_floor`` is relative to the squared bounding-box diagonal.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    params: np.ndarray | None = None
    name: str = "mesh"
    area_floor: float = AREA_FLOOR
    _edges: dict | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", _frozen(self.vertices, float))
        object.__setattr__(self, "triangles", _frozen(self.triangles, np.int64))
        if self.params is not None:
            object.__setattr__(self, "params", _frozen(self.params, float))
        V, T = self.vertices, self.triangles
        if V.ndim != 2 or V.shape[1] != 3:
            raise MeshError("vertices must have shape (n, 3)")
        if T.ndim != 2 or T.shape[1] != 3 or len(T) == 0:
            raise MeshError("triangles must have shape (m, 3), m > 0")
        if T.min() < 0 or T.max() >= len(V):
            raise MeshError("triangle index out of range")
        if np.any((T[:, 0] == T[:, 1]) | (T[:, 1] == T[:, 2]) | (T[:, 0] == T[:, 2])):
            raise DegenerateTriangleError("triangle with repeated vertex")
        if self._edges is None:
            self._check_orientation()
        floor = self.area_floor * self.scale**2
        areas = triangle_areas(self)
        if np.any(areas <= floor):
            bad = int(np.argmin(areas))
            raise DegenerateTriangleError(
                f"{self.name}: triangle {bad} area {areas[bad]:.3e} below floor {floor:.3e}"
            )

    def _check_orientation(self):
        T = self.triangles
        directed = np.concatenate([T[:, [0, 1]], T[:, [1, 2]], T[:, [2, 0]]])
        codes = directed[:, 0] * len(self.vertices) + directed[:, 1]
        if len(np.unique(codes)) != len(codes):
            raise NonOrientableMeshError(
                f"{self.name}: directed edge repeated (inconsistent winding or non-orientable)"
            )
        undirected = np.sort(directed, axis=1)
        keys, counts = np.unique(undirected, axis=0, return_counts=True)
        if counts.max() > 2:
            raise MeshError(f"{self.name}: edge shared by more than two triangles")
        object.__setattr__(self, "_edges", {"keys": keys, "counts": counts})

    @property
    def scale(self) -> float:
        V = self.vertices
        return float(np.linalg.norm(V.max(axis=0) - V.min(axis=0))) or 1.0

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> np.ndarray:
        return self._edges["keys"]

    @property
    def boundary_edges(self) -> np.ndarray:
        return self._edges["keys"][self._edges["counts"] == 1]

    @property
    def boundary(self) -> np.ndarray:
        flags = np.zeros(self.n_vertices, bool)
        flags[self.boundary_edges.ravel()] = True
        return flags

    @property
    def is_closed(self) -> bool:
        return len(self.boundary_edges) == 0

    @property
    def euler_characteristic(self) -> int:
        used = np.unique(self.triangles)
        return int(len(used) - len(self.edges) + len(self.triangles))

    def edge_lengths(self) -> np.ndarray:
        e = self.edges
        return np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1)

    def with_vertices(self, vertices) -> "TriangleMesh":
        # same connectivity: reuse the validated edge table
        return TriangleMesh(vertices, self.triangles, self.params, self.name, self.area_floor, self._edges)


# ---------------------------------------------------------------- builders


def _collapse_lines(P, idx, lines, axis, tol):
    """Merge every grid line (row for axis 0, column for axis 1) mapped to one point."""
    for k in lines:
        pts = P[k] if axis == 0 else P[:, k]
        if np.max(np.linalg.norm(pts - pts[0], axis=1)) < tol:
            if axis == 0:
                idx[k, :] = idx[k, 0]
            else:
                idx[:, k] = idx[0, k]


def triangulate(
    patch: ParametricPatch,
    nu: int,
    nv: int,
    wrap_u: bool | None = None,
    wrap_v: bool | None = None,
    collapse_tol: float = 1e-12,
) -> TriangleMesh:
    """Regular grid triangulation of a patch with ``nu x nv`` cells.

    Wrapped directions identify the first and last grid lines.  Boundary
    rows that the patch maps to a single point (sphere poles, the center of
    a polar disk) are merged into one vertex, and the resulting zero-area
    triangles are dropped.
    """
    if nu < 2 or nv < 2:
        raise MeshError("nu and nv must be at least 2")
    wrap_u = patch.periodic[0] if wrap_u is None else wrap_u
    wrap_v = patch.periodic[1] if wrap_v is None else wrap_v
    u0, u1, v0, v1 = patch.domain
    n_i = nu if wrap_u else nu + 1
    n_j = nv if wrap_v else nv + 1
    us = u0 + (u1 - u0) * np.arange(n_i) / nu
    vs = v0 + (v1 - v0) * np.arange(n_j) / nv
    U, Vv = np.meshgrid(us, vs, indexing="ij")
    P = patch(U, Vv)
    scale = float(np.linalg.norm(P.reshape(-1, 3).max(0) - P.reshape(-1, 3).min(0))) or 1.0
    tol = collapse_tol * scale
    idx = np.arange(n_i * n_j).reshape(n_i, n_j)
    if not wrap_u:
        _collapse_lines(P, idx, [0, n_i - 1], 0, tol)
    if not wrap_v:
        _collapse_lines(P, idx, [0, n_j - 1], 1, tol)

    tris = []
    for i in range(nu):
        ip = (i + 1) % n_i
        for j in range(nv):
            jp = (j + 1) % n_j
            a, b, c, d = idx[i, j], idx[ip, j], idx[ip, jp], idx[i, jp]
            tris.append((a, b, c))
            tris.append((a, c, d))
    tris = np.array(tris)
    keep = (tris[:, 0] != tris[:, 1]) & (tris[:, 1] != tris[:, 2]) & (tris[:, 0] != tris[:, 2])
    tris = tris[keep]
    used, inverse = np.unique(tris, return_inverse=True)
    flatP = P.reshape(-1, 3)
    params = np.stack([U.ravel(), Vv.ravel()], axis=1)
    return TriangleMesh(
        flatP[used], inverse.reshape(-1, 3), params[used], name=f"{patch.name}_{nu}x{nv}"
    )


_ICO_V = [
    (-1, 1, 0), (1, 1, 0), (-1, -1, 0), (1, -1, 0),
    (0, -1, 1), (0, 1, 1), (0, -1, -1), (0, 1, -1),
    (1, 0, -1), (1, 0, 1), (-1, 0, -1), (-1, 0, 1),
]
_ICO_F = [
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
]


def icosphere(level: int, radius: float = 1.0) -> TriangleMesh:
    """Subdivided icosahedron projected to a sphere (outward winding)."""
    t = (1 + 5**0.5) / 2
    V = np.array(_ICO_V, float)
    # golden-ratio placement: (+-1, +-t, 0), (0, +-1, +-t), (+-t, 0, +-1)
    V[:4, 1] *= t
    V[4:8, 2] *= t
    V[8:, 0] *= t
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    verts = list(V)
    F = np.array(_ICO_F)
    for _ in range(level):
        cache: dict = {}

        def mid(a, b):
            key = (a, b) if a < b else (b, a)
            if key not in cache:
                p = verts[a] + verts[b]
                verts.append(p / np.linalg.norm(p))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in F:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        F = np.array(new)
    return TriangleMesh(radius * np.array(verts), F, name=f"icosphere{level}")


def voxel_surface(filled: np.ndarray, name: str = "voxels") -> TriangleMesh:
    """Outward-oriented boundary surface of a union of unit voxels."""
    filled = np.asarray(filled, bool)
    pad = np.pad(filled, 1)
    quads = []
    # per axis: quad corner offsets ordered so the normal points along +axis
    faces = {
        0: [(0, 0, 0), (0, 1, 0), (0, 1, 1), (0, 0, 1)],
        1: [(0, 0, 0), (0, 0, 1), (1, 0, 1), (1, 0, 0)],
        2: [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)],
    }
    for axis in range(3):
        step = np.zeros(3, int)
        step[axis] = 1
        for idx in np.argwhere(pad):
            for sign in (1, -1):
                nb = idx + sign * step
                if pad[tuple(nb)]:
                    continue
                base = idx - 1 + (step if sign == 1 else 0)
                corners = [tuple(base + np.array(c)) for c in faces[axis]]
                quads.append(corners if sign == 1 else corners[::-1])
    keys: dict = {}
    tris = []
    for q in quads:
        ids = [keys.setdefault(c, len(keys)) for c in q]
        tris += [(ids[0], ids[1], ids[2]), (ids[0], ids[2], ids[3])]
    verts = np.zeros((len(keys), 3))
    for c, i in keys.items():
        verts[i] = c
    return TriangleMesh(verts, tris, name=name)


def genus2_mesh() -> TriangleMesh:
    """Closed genus-2 surface: a 5x3x1 voxel slab with two holes."""
    filled = np.ones((5, 3, 1), bool)
    filled[1, 1, 0] = False
    filled[3, 1, 0] = False
    return voxel_surface(filled, name="genus2")


# ---------------------------------------------------------------- geometry


def triangle_areas(mesh: TriangleMesh) -> np.ndarray:
    V, T = mesh.vertices, mesh.triangles
    cr = np.cross(V[T[:, 1]] - V[T[:, 0]], V[T[:, 2]] - V[T[:, 0]])
    return 0.5 * np.linalg.norm(cr, axis=1)


def mesh_area(mesh: TriangleMesh) -> float:
    return float(np.sum(triangle_areas(mesh)))


def _corner_cotangents(mesh):
    """Cotangent of the angle at each corner, shape (m, 3)."""
    V, T = mesh.vertices, mesh.triangles
    dbl = 2 * triangle_areas(mesh)
    cots = np.empty(T.shape)
    for k in range(3):
        a = V[T[:, (k + 1) % 3]] - V[T[:, k]]
        b = V[T[:, (k + 2) % 3]] - V[T[:, k]]
        cots[:, k] = np.einsum("ij,ij->i", a, b) / dbl
    return cots


def cotangent_weights(mesh: TriangleMesh) -> sp.csr_matrix:
    """Symmetric matrix of edge weights ``(cot a + cot b) / 2``."""
    T = mesh.triangles
    cots = _corner_cotangents(mesh)
    rows, cols, vals = [], [], []
    for k in range(3):
        i, j = T[:, (k + 1) % 3], T[:, (k + 2) % 3]
        w = 0.5 * cots[:, k]
        rows += [i, j]
        cols += [j, i]
        vals += [w, w]
    n = mesh.n_vertices
    W = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()
    W.sum_duplicates()
    return W


def stiffness_matrix(mesh: TriangleMesh) -> sp.csr_matrix:
    """Positive semidefinite P1 stiffness ``K = D - W`` (Delta = -div grad)."""
    W = cotangent_weights(mesh)
    W = 0.5 * (W + W.T)  # exact symmetry regardless of summation order
    D = sp.diags(np.asarray(W.sum(axis=1)).ravel())
    return (D - W).tocsr()


def mixed_areas(mesh: TriangleMesh) -> np.ndarray:
    """Mixed Voronoi vertex areas; obtuse triangles split barycentrically."""
    V, T = mesh.vertices, mesh.triangles
    cots = _corner_cotangents(mesh)
    areas = triangle_areas(mesh)
    obtuse = np.any(cots < 0, axis=1)
    A = np.zeros(mesh.n_vertices)
    for k in range(3):
        j, l = (k + 1) % 3, (k + 2) % 3
        ekj = np.sum((V[T[:, j]] - V[T[:, k]]) ** 2, axis=1)
        ekl = np.sum((V[T[:, l]] - V[T[:, k]]) ** 2, axis=1)
        vor = (ekj * cots[:, l] + ekl * cots[:, j]) / 8.0
        np.add.at(A, T[:, k], np.where(obtuse, areas / 3.0, vor))
    return A


def vertex_normals(mesh: TriangleMesh) -> np.ndarray:
    V, T = mesh.vertices, mesh.triangles
    cr = np.cross(V[T[:, 1]] - V[T[:, 0]], V[T[:, 2]] - V[T[:, 0]])
    N = np.zeros_like(V)
    for k in range(3):
        np.add.at(N, T[:, k], cr)
    nrm = np.linalg.norm(N, axis=1, keepdims=True)
    return N / np.where(nrm > 0, nrm, 1.0)


def cotan_laplacian_positions(mesh: TriangleMesh, areas: np.ndarray | None = None) -> np.ndarray:
    """Discrete Laplace-Beltrami of the position, ``sum w_ij (x_j - x_i) / A_i``.

    This approximates the mean curvature vector ``-2 H nu``.
    """
    K = stiffness_matrix(mesh)
    A = mixed_areas(mesh) if areas is None else areas
    return -(K @ mesh.vertices) / A[:, None]


class MeanCurvature(NamedTuple):
    H: np.ndarray
    normal: np.ndarray
    flagged: np.ndarray  # boundary or zero-area vertices (H is nan there)


def mesh_mean_curvature(mesh: TriangleMesh) -> MeanCurvature:
    """Per-vertex mean curvature ``H = -<Delta x, nu> / 2`` at interior vertices."""
    A = mixed_areas(mesh)
    flagged = mesh.boundary | ~(A > 0)
    safe = np.where(flagged, 1.0, A)
    lap = cotan_laplacian_positions(mesh, safe)
    N = vertex_normals(mesh)
    H = -0.5 * np.einsum("ij,ij->i", lap, N)
    H[flagged] = np.nan
    return MeanCurvature(H, N, flagged)


def angle_defects(mesh: TriangleMesh) -> np.ndarray:
    """``2 pi - sum of incident angles`` per vertex (boundary vertices: pi - sum)."""
    V, T = mesh.vertices, mesh.triangles
    ang = np.zeros(mesh.n_vertices)
    for k in range(3):
        a = V[T[:, (k + 1) % 3]] - V[T[:, k]]
        b = V[T[:, (k + 2) % 3]] - V[T[:, k]]
        c = np.arctan2(np.linalg.norm(np.cross(a, b), axis=1), np.einsum("ij,ij->i", a, b))
        np.add.at(ang, T[:, k], c)
    full = np.where(mesh.boundary, np.pi, 2 * np.pi)
    used = np.zeros(mesh.n_vertices, bool)
    used[T.ravel()] = True
    return np.where(used, full - ang, 0.0)


def mesh_gaussian_curvature(mesh: TriangleMesh) -> np.ndarray:
    return angle_defects(mesh) / mixed_areas(mesh)


class ConvergenceLadder(NamedTuple):
    sizes: np.ndarray  # longest edge per level
    errors: np.ndarray  # max |H - 1| per level
    orders: np.ndarray  # log2 of successive error ratios


def sphere_curvature_ladder(levels=(2, 3, 4)) -> ConvergenceLadder:
    """Max-norm error of discrete H on unit icospheres under uniform refinement.

    Level 1 is skipped by default because its vertices are all equivalent
    under the icosahedral group and the estimate is exact there.
    """
    sizes, errors = [], []
    for level in levels:
        mesh = icosphere(level)
        H = mesh_mean_curvature(mesh).H
        errors.append(float(np.nanmax(np.abs(H - 1.0))))
        V, T = mesh.vertices, mesh.triangles
        sizes.append(float(max(np.linalg.norm(V[T[:, k]] - V[T[:, (k + 1) % 3]], axis=1).max() for k in range(3))))
    errors = np.array(errors)
    return ConvergenceLadder(np.array(sizes), errors, np.log2(errors[:-1] / errors[1:]))
