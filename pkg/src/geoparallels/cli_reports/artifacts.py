"""Deterministic CSV and SVG artifacts with pass/fail check records."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Check",
    "check_close",
    "check_le",
    "check_ge",
    "check_equal",
    "note",
    "fmt",
    "write_csv",
    "write_certification_csv",
    "line_plot_svg",
    "sha256_file",
]


def fmt(x) -> str:
    """Shortest round-tripping text for numbers; plain ``str`` otherwise."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


@dataclass(frozen=True)
class Check:
    """One certification row.

    ``relation`` is ``abs`` (``|value - expected| <= tolerance``), ``le``,
    ``ge``, ``eq`` or ``info``; ``info`` rows are reported without a verdict.
    """

    name: str
    value: object
    expected: object
    tolerance: float
    relation: str = "abs"

    @property
    def passed(self) -> bool | None:
        v, e = self.value, self.expected
        if self.relation == "info":
            return None
        if self.relation == "eq":
            return bool(v == e)
        v = float(v)
        if not math.isfinite(v):
            return False
        if self.relation == "abs":
            return bool(abs(v - float(e)) <= self.tolerance)
        if self.relation == "le":
            return bool(v <= float(e))
        if self.relation == "ge":
            return bool(v >= float(e))
        raise ValueError(f"unknown relation {self.relation!r}")

    def row(self) -> list[str]:
        expected = {"le": "<=", "ge": ">="}.get(self.relation, "") + fmt(self.expected)
        verdict = {None: "n/a", True: "pass", False: "fail"}[self.passed]
        return [self.name, fmt(self.value), expected, fmt(self.tolerance), verdict]


def check_close(name, value, expected, tol) -> Check:
    return Check(name, float(value), float(expected), float(tol), "abs")


def check_le(name, value, bound) -> Check:
    return Check(name, float(value), float(bound), 0.0, "le")


def check_ge(name, value, bound) -> Check:
    return Check(name, float(value), float(bound), 0.0, "ge")


def check_equal(name, value, expected) -> Check:
    return Check(name, value, expected, 0.0, "eq")


def note(name, value) -> Check:
    return Check(name, value, "", 0.0, "info")


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])
    return path


def write_certification_csv(path, checks) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["check", "value", "expected", "tolerance", "pass"])
        for c in checks:
            w.writerow(c.row())
    return path


def line_plot_svg(path, x, series: dict, xlabel: str, ylabel: str, title: str = "", logy: bool = False) -> Path:
    """A plain line chart; byte-identical output for identical data."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": "geoparallels", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        for label, y in series.items():
            ax.plot(np.asarray(x, float), np.asarray(y, float), marker=".", label=label)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if logy:
            ax.set_yscale("log")
        if len(series) > 1:
            ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
