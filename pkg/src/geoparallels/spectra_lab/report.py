"""Spectral reports, the eigensolver wrapper and spectrum CSVs."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

__all__ = [
    "SpectralError",
    "SpectralReport",
    "make_report",
    "generalized_spectrum",
    "morse_index",
    "write_spectrum_csv",
    "write_index_csv",
]

DENSE_LIMIT = 800


class SpectralError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray
    index: int
    tol_neg: float
    operator_size: int

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, float)
        if np.any(np.diff(ev) < 0):
            raise ValueError("eigenvalues must be ascending")
        if self.index != int(np.sum(ev < -self.tol_neg)):
            raise ValueError("index inconsistent with eigenvalues and tol_neg")
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def first(self) -> float:
        return float(self.eigenvalues[0])


def make_report(eigenvalues, tol_neg: float = 1e-9, operator_size: int | None = None) -> SpectralReport:
    ev = np.sort(np.asarray(eigenvalues, float))
    size = len(ev) if operator_size is None else operator_size
    return SpectralReport(ev, int(np.sum(ev < -tol_neg)), tol_neg, size)


def morse_index(report: SpectralReport) -> int:
    """Number of eigenvalues below ``-tol_neg``."""
    return int(np.sum(report.eigenvalues < -report.tol_neg))


def generalized_spectrum(A, mass, k: int, sigma: float | None = None, rel_tol: float = 1e-9) -> SpectralReport:
    """``k`` smallest eigenvalues of ``A x = lam diag(mass) x``.

    The problem is reduced to the symmetric matrix ``M^-1/2 A M^-1/2``.
    Small problems use a dense solver; larger ones use shift-invert Lanczos
    around ``sigma``, which must lie below the spectrum.  ``tol_neg`` is
    ``rel_tol`` times the infinity norm of the reduced operator.
    """
    A = sp.csr_matrix(A)
    mass = np.asarray(mass, float)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    if np.any(mass <= 0):
        raise SpectralError("mass must be positive")
    s = 1 / np.sqrt(mass)
    S = sp.diags(s) @ A @ sp.diags(s)
    S = 0.5 * (S + S.T)
    norm = float(abs(S).sum(axis=1).max())
    if n <= DENSE_LIMIT:
        ev = eigh(S.toarray(), eigvals_only=True, subset_by_index=(0, k - 1))
    else:
        if sigma is None:
            raise SpectralError("sparse solve needs a shift below the spectrum")
        try:
            ev, vec = eigsh(S.tocsc(), k=k, sigma=sigma, which="LM", tol=1e-12)
        except ArpackNoConvergence as exc:
            res = [
                float(np.linalg.norm(S @ v - lam * v))
                for lam, v in zip(exc.eigenvalues, exc.eigenvectors.T)
            ]
            raise SpectralError(f"eigensolver did not converge; residual norms {res}") from exc
        ev = np.sort(ev)
    return make_report(ev, rel_tol * norm, n)


def write_spectrum_csv(reports: dict, path) -> Path:
    """Rows ``(problem_id, i, eigenvalue)`` for each named report."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["problem_id", "i", "eigenvalue"])
        for pid, rep in reports.items():
            for i, lam in enumerate(rep.eigenvalues):
                w.writerow([pid, i, repr(float(lam))])
    return path


def write_index_csv(reports: dict, path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["problem_id", "operator_size", "index", "tol_neg", "lambda_1"])
        for pid, rep in reports.items():
            w.writerow([pid, rep.operator_size, rep.index, repr(rep.tol_neg), repr(rep.first)])
    return path
