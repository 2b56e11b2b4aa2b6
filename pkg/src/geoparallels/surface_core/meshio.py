"""OFF / OBJ mesh files and per-vertex curvature CSV dumps."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .mesh import MeshError, TriangleMesh, mesh_gaussian_curvature, mesh_mean_curvature

__all__ = ["write_off", "read_off", "write_obj", "read_obj", "write_curvature_csv"]


def _fmt(x: float) -> str:
    return repr(float(x))


def write_off(mesh: TriangleMesh, path) -> Path:
    path = Path(path)
    lines = ["OFF", f"{mesh.n_vertices} {len(mesh.triangles)} 0"]
    lines += [" ".join(_fmt(c) for c in v) for v in mesh.vertices]
    lines += ["3 " + " ".join(str(int(i)) for i in t) for t in mesh.triangles]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _tokens(path):
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def read_off(path, name: str | None = None) -> TriangleMesh:
    it = _tokens(path)
    head = next(it)
    if head != "OFF":
        raise MeshError(f"{path}: not an OFF file")
    nv, nf, _ = (int(x) for x in next(it).split())
    verts = [[float(x) for x in next(it).split()[:3]] for _ in range(nv)]
    tris = []
    for _ in range(nf):
        parts = [int(x) for x in next(it).split()]
        if parts[0] != 3:
            raise MeshError(f"{path}: only triangular faces are supported")
        tris.append(parts[1:4])
    return TriangleMesh(np.array(verts), np.array(tris), name=name or Path(path).stem)


def write_obj(mesh: TriangleMesh, path) -> Path:
    path = Path(path)
    lines = ["v " + " ".join(_fmt(c) for c in v) for v in mesh.vertices]
    lines += ["f " + " ".join(str(int(i) + 1) for i in t) for t in mesh.triangles]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_obj(path, name: str | None = None) -> TriangleMesh:
    """Vertices and triangular faces only; ``v/vt/vn`` face tokens keep the vertex index."""
    verts, tris = [], []
    for line in _tokens(path):
        tag, *rest = line.split()
        if tag == "v":
            verts.append([float(x) for x in rest[:3]])
        elif tag == "f":
            if len(rest) != 3:
                raise MeshError(f"{path}: only triangular faces are supported")
            tris.append([int(tok.split("/")[0]) - 1 for tok in rest])
    return TriangleMesh(np.array(verts), np.array(tris), name=name or Path(path).stem)


def write_curvature_csv(mesh: TriangleMesh, path) -> Path:
    """Columns ``vid,x,y,z,H,K``; H is empty at flagged (boundary) vertices."""
    path = Path(path)
    mc = mesh_mean_curvature(mesh)
    K = mesh_gaussian_curvature(mesh)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["vid", "x", "y", "z", "H", "K"])
        for i, (p, h, k) in enumerate(zip(mesh.vertices, mc.H, K)):
            w.writerow([i, *(_fmt(c) for c in p), "" if np.isnan(h) else _fmt(h), _fmt(k)])
    return path
