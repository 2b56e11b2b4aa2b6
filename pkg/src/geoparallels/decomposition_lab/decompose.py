"""Sheeted/non-sheeted and thick/thin decompositions, and mesh Gauss-Bonnet."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from ..chart_lab.charts import MetricChart
from ..chart_lab.geodesics import shoot_ball
from ..surface_core.mesh import MeshError, TriangleMesh, angle_defects
from ..surface_core.patches import ParametricPatch
from .regions import region_area
from .stability import stability_radius

__all__ = [
    "DecompositionLabels",
    "sheeted_decomposition",
    "curvature_scale",
    "thick_thin",
    "gauss_bonnet_mesh",
    "write_labels_csv",
]

SCALE_CAP = 1.0


@dataclass(frozen=True)
class DecompositionLabels:
    """Per-point labels with the scale and measure they were derived from.

    ``measure`` is the area (surfaces) or volume (charts) at the scale, and
    ``threshold`` is ``n0`` or ``V0``; ``label_from`` reproduces the labels.
    """

    kind: str  # sheeted | thick_thin
    points: np.ndarray
    scales: np.ndarray
    measures: np.ndarray
    labels: tuple
    thresholds: dict = field(default_factory=dict)

    @staticmethod
    def label_from(kind, scales, measures, threshold) -> tuple:
        scales = np.asarray(scales, float)
        measures = np.asarray(measures, float)
        if kind == "sheeted":
            big = measures > threshold * scales**2
            return tuple("non_sheeted" if b else "sheeted" for b in big)
        big = measures > threshold * scales**4
        return tuple("thick" if b else "thin" for b in big)

    def relabel(self, threshold=None) -> "DecompositionLabels":
        key = "n0" if self.kind == "sheeted" else "V0"
        thr = self.thresholds[key] if threshold is None else threshold
        labels = self.label_from(self.kind, self.scales, self.measures, thr)
        return DecompositionLabels(
            self.kind, self.points, self.scales, self.measures, labels, {**self.thresholds, key: thr}
        )

    def counts(self) -> dict:
        out: dict = {}
        for lab in self.labels:
            out[lab] = out.get(lab, 0) + 1
        return out


def sheeted_decomposition(patch: ParametricPatch, r: float, n0: float, samples, **kw) -> DecompositionLabels:
    """Label parameter samples non-sheeted when ``Area(B(p, s(p))) > n0 s(p)^2``.

    ``s(p)`` is the stability radius capped at ``r``.
    """
    uv = np.atleast_2d(np.asarray(samples, float))
    pts = patch(uv[:, 0], uv[:, 1])
    scales, areas = [], []
    for q, p in zip(uv, pts):
        s = stability_radius(patch, p, r, center=q, **kw)
        scales.append(s)
        areas.append(region_area(patch, p, s, center=q) if s > 0 else 0.0)
    labels = DecompositionLabels.label_from("sheeted", scales, areas, n0)
    return DecompositionLabels("sheeted", pts, np.array(scales), np.array(areas), labels, {"r": r, "n0": n0})


def _scale_and_volume(chart: MetricChart, p, eps: float, **kw):
    shot = shoot_ball(chart, p, SCALE_CAP, with_curvature=True, **kw)
    if shot.energy[-1] <= eps:
        r = SCALE_CAP
    else:
        r = float(brentq(lambda t: float(shot.energy_at(t)) - eps, 0.0, SCALE_CAP, xtol=1e-12))
    return r, float(shot.volume_at(r))


def curvature_scale(chart: MetricChart, p, eps: float, **kw) -> float:
    """Largest ``r <= 1`` with ``int_{B(p,r)} |Rm|^2 <= eps``.

    The energy is accumulated along one polar shooting to radius 1 and the
    crossing is located on its Hermite interpolant.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    return _scale_and_volume(chart, p, eps, **kw)[0]


def thick_thin(chart: MetricChart, eps: float, V0: float, samples, **kw) -> DecompositionLabels:
    """Label chart points thick when ``Vol(B(p, r_eps)) > V0 r_eps^4``."""
    X = np.atleast_2d(np.asarray(samples, float))
    out = [_scale_and_volume(chart, x, eps, **kw) for x in X]
    scales = np.array([o[0] for o in out])
    vols = np.array([o[1] for o in out])
    labels = DecompositionLabels.label_from("thick_thin", scales, vols, V0)
    return DecompositionLabels("thick_thin", X, scales, vols, labels, {"eps": eps, "V0": V0})


def gauss_bonnet_mesh(mesh: TriangleMesh) -> tuple[float, int]:
    """Total angle defect of a closed mesh and the Euler characteristic it implies."""
    if not mesh.is_closed:
        raise MeshError(f"{mesh.name}: Gauss-Bonnet needs a closed mesh")
    total = float(np.sum(angle_defects(mesh)))
    return total, int(round(total / (2 * np.pi)))


def write_labels_csv(labels: DecompositionLabels, path) -> Path:
    path = Path(path)
    d = labels.points.shape[1]
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_id", *[f"x{i}" for i in range(d)], "scale", "label"])
        for i, (pt, s, lab) in enumerate(zip(labels.points, labels.scales, labels.labels)):
            w.writerow([i, *[repr(float(c)) for c in pt], repr(float(s)), lab])
    return path
