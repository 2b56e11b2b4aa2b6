"""Mean curvature flow ``X_t = -H nu`` on triangle meshes."""

from __future__ import annotations

import warnings

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from ..surface_core.mesh import (
    MeshError,
    TriangleMesh,
    mesh_area,
    mesh_mean_curvature,
    mixed_areas,
    stiffness_matrix,
)
from .trajectory import FlowTrajectory, StepRecord

__all__ = [
    "CFL_FACTOR",
    "CFLWarning",
    "StepRejectedError",
    "cfl_bound",
    "normal_speed",
    "mcf_step",
    "mcf_run",
]

CFL_FACTOR = 0.25


class CFLWarning(RuntimeWarning):
    pass


class StepRejectedError(MeshError):
    pass


def cfl_bound(mesh: TriangleMesh) -> float:
    return CFL_FACTOR * float(mesh.edge_lengths().min()) ** 2


def normal_speed(mesh: TriangleMesh) -> np.ndarray:
    """Velocity ``-H nu`` per vertex; zero on boundary and flagged vertices."""
    mc = mesh_mean_curvature(mesh)
    H = np.where(mc.flagged, 0.0, mc.H)
    return -H[:, None] * mc.normal


def mcf_step(mesh: TriangleMesh, dt: float, scheme: str = "explicit", warn: bool = True) -> TriangleMesh:
    """Advance one time step; boundary vertices stay fixed.

    ``explicit`` moves vertices by ``-H nu dt``.  ``semi_implicit`` solves
    ``(M + dt/2 K) X' = M X`` with the lumped mixed-area mass M, since
    ``-H nu = Delta X / 2``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    V = mesh.vertices
    if scheme == "explicit":
        if warn and dt > cfl_bound(mesh):
            warnings.warn(f"dt={dt:.3g} exceeds the explicit bound {cfl_bound(mesh):.3g}", CFLWarning, stacklevel=2)
        new = V + dt * normal_speed(mesh)
    elif scheme == "semi_implicit":
        M = mixed_areas(mesh)
        A = (sp.diags(M) + 0.5 * dt * stiffness_matrix(mesh)).tolil()
        rhs = M[:, None] * V
        for i in np.flatnonzero(mesh.boundary):
            A.rows[i] = [i]
            A.data[i] = [1.0]
            rhs[i] = V[i]
        new = np.column_stack([spsolve(A.tocsc(), rhs[:, k]) for k in range(3)])
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    try:
        return mesh.with_vertices(new)
    except MeshError as exc:
        raise StepRejectedError(f"step rejected at dt={dt:.3g}: {exc}") from exc


def mcf_run(
    mesh: TriangleMesh,
    dt: float,
    t_end: float,
    scheme: str = "explicit",
    adaptive: bool = True,
    area_stop: float = 1e-3,
    min_dt: float = 1e-10,
    max_steps: int = 1_000_000,
) -> FlowTrajectory:
    """Integrate the flow to ``t_end`` or until the surface collapses.

    Steps that degenerate a triangle or increase the area are rejected and
    retried with half the step; accepted steps double it back towards ``dt``.  With ``adaptive`` the explicit step is also
    capped by the stability bound as the mesh shrinks.  The run stops with
    ``stop_reason`` ``"t_end"``, ``"collapse"`` (area below ``area_stop``
    times the initial area) or ``"singular"`` (no admissible step above
    ``min_dt``); the last valid state is always kept.
    """
    traj = FlowTrajectory("mcf", template=mesh)
    a0 = mesh_area(mesh)
    speed = np.linalg.norm(normal_speed(mesh), axis=1).max()
    traj.append(0.0, mesh.vertices, a0, speed)
    t, cur, area = 0.0, mesh, a0
    step_dt = dt
    for _ in range(max_steps):
        if t >= t_end * (1 - 1e-12):
            traj.stop_reason = "t_end"
            break
        h = min(step_dt, t_end - t)
        if adaptive and scheme == "explicit":
            h = min(h, cfl_bound(cur))
        try:
            nxt = mcf_step(cur, h, scheme, warn=not adaptive)
            new_area = mesh_area(nxt)
            if new_area > area:
                raise StepRejectedError("area increased")
        except StepRejectedError as exc:
            traj.step_log.append(StepRecord(t, h, False, str(exc)))
            if speed == 0:
                traj.stop_reason = "singular"
                break
            step_dt = h / 2
            if step_dt < min_dt:
                traj.stop_reason = "singular"
                break
            continue
        traj.step_log.append(StepRecord(t, h, True))
        step_dt = min(dt, 2 * step_dt)
        t = t + h
        cur, area = nxt, new_area
        speed = np.linalg.norm(normal_speed(cur), axis=1).max()
        traj.append(t, cur.vertices, area, speed)
        if area < area_stop * a0:
            traj.stop_reason = "collapse"
            break
    else:
        traj.stop_reason = "max_steps"
    return traj
