"""Flow trajectories and their CSV form."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["StepRecord", "FlowTrajectory", "write_trajectory_csv"]


@dataclass(frozen=True)
class StepRecord:
    t: float
    dt: float
    accepted: bool
    reason: str = ""


@dataclass
class FlowTrajectory:
    """Accepted states of a flow with the full step log.

    ``states`` holds vertex arrays for mesh flows and parameter vectors for
    metric families; ``area_or_volume`` and ``max_speed`` are per accepted time.
    """

    kind: str
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    area_or_volume: list = field(default_factory=list)
    max_speed: list = field(default_factory=list)
    step_log: list = field(default_factory=list)
    stop_reason: str = ""
    template: object = None  # mesh whose triangles the vertex states share

    def append(self, t, state, size, speed):
        if self.times and not t > self.times[-1]:
            raise ValueError("trajectory times must increase strictly")
        self.times.append(float(t))
        self.states.append(np.array(state, copy=True))
        self.area_or_volume.append(float(size))
        self.max_speed.append(float(speed))

    @property
    def final_state(self):
        return self.states[-1]

    @property
    def final_time(self) -> float:
        return self.times[-1]

    def extinction_time(self, tail: float = 0.25) -> float:
        """Root of a linear fit to the area over the final stretch of the run.

        Near extinction a shrinking convex surface loses area at a nearly
        constant rate, so the root estimates when the flow would vanish even
        if the discretization stopped shortly before.  ``tail`` is the
        fraction of the initial area below which samples enter the fit.
        """
        a = np.asarray(self.area_or_volume)
        t = np.asarray(self.times)
        sel = a < tail * a[0]
        if sel.sum() < 3:
            raise ValueError("run did not shrink far enough to estimate extinction")
        slope, icept = np.polyfit(t[sel], a[sel], 1)
        if slope >= 0:
            raise ValueError("area is not decreasing near the end of the run")
        return float(-icept / slope)

    def mesh_at(self, i: int):
        if self.template is None:
            raise ValueError("not a mesh trajectory")
        return self.template.with_vertices(self.states[i])

    def rows(self):
        """(t, area_or_volume, max_speed, accepted) for every logged step, in order.

        The initial state is the first row; rejected steps carry NaN sizes.
        """
        out = [(self.times[0], self.area_or_volume[0], self.max_speed[0], True)]
        k = 1
        for rec in self.step_log:
            if rec.accepted:
                out.append((self.times[k], self.area_or_volume[k], self.max_speed[k], True))
                k += 1
            else:
                out.append((rec.t + rec.dt, float("nan"), float("nan"), False))
        return out


def write_trajectory_csv(traj: FlowTrajectory, path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "area_or_volume", "max_speed", "accepted"])
        for t, a, s, ok in traj.rows():
            w.writerow([repr(float(t)), repr(float(a)), repr(float(s)), int(ok)])
    return path
