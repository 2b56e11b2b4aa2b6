import numpy as np
import pytest
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.optimize import brentq
from scipy.special import jn_zeros

from geoparallels.spectra_lab import (
    SpectralError, assemble_jacobi, generalized_spectrum, index_transition, lichnerowicz_torus_spectrum,
    make_report, morse_index, spectrum, sym_basis, tt_basis, write_index_csv, write_spectrum_csv,
)
from geoparallels.spectra_lab import report as report_mod
from geoparallels.surface_core import catenoid, disk, plane, triangulate

# t tanh t = 1 marks the last stable symmetric catenoid piece |t| < t0
CATENOID_T0 = brentq(lambda t: t * np.tanh(t) - 1, 0.5, 2.0)


def _random_problem(rng, n):
    B = rng.normal(size=(n, n))
    A = B + B.T
    mass = rng.uniform(0.5, 2.0, n)
    return A, mass


def test_generalized_spectrum_matches_dense_oracle(rng):
    A, mass = _random_problem(rng, 60)
    ref = eigh(A, np.diag(mass), eigvals_only=True)[:5]
    rep = generalized_spectrum(sp.csr_matrix(A), mass, 5)
    np.testing.assert_allclose(rep.eigenvalues, ref, atol=1e-10)
    assert rep.index == int(np.sum(ref < -rep.tol_neg))


def test_sparse_path_matches_dense_oracle(rng, monkeypatch):
    n = 120
    main = 2 + rng.uniform(0, 1, n)
    A = sp.diags([main, -np.ones(n - 1), -np.ones(n - 1)], [0, -1, 1]).tocsr()
    mass = rng.uniform(0.5, 2.0, n)
    ref = eigh(A.toarray(), np.diag(mass), eigvals_only=True)[:4]
    monkeypatch.setattr(report_mod, "DENSE_LIMIT", 10)
    rep = generalized_spectrum(A, mass, 4, sigma=-1.0)
    np.testing.assert_allclose(rep.eigenvalues, ref, atol=1e-9)
    with pytest.raises(SpectralError):
        generalized_spectrum(A, mass, 4)


def test_generalized_spectrum_input_errors():
    A = sp.eye(4).tocsr()
    with pytest.raises(SpectralError):
        generalized_spectrum(A, [1.0, 1.0, 0.0, 1.0], 2)
    with pytest.raises(ValueError):
        generalized_spectrum(A, np.ones(4), 5)


def test_report_consistency():
    rep = make_report([0.5, -2.0, -1e-12, 3.0], tol_neg=1e-9)
    assert rep.index == morse_index(rep) == 1
    np.testing.assert_array_equal(rep.eigenvalues, [-2.0, -1e-12, 0.5, 3.0])
    with pytest.raises(ValueError):
        report_mod.SpectralReport(np.array([1.0, 0.0]), 0, 1e-9, 2)


def test_disk_first_eigenvalue_matches_bessel_zero():
    patch = disk()
    rep = spectrum(assemble_jacobi(patch, triangulate(patch, 40, 40)), 3)
    exact = jn_zeros(0, 1)[0] ** 2
    assert rep.index == 0
    assert abs(rep.first - exact) / exact < 0.01


def test_plane_potential_vanishes():
    patch = plane()
    op = assemble_jacobi(patch, triangulate(patch, 8, 8))
    np.testing.assert_array_equal(op.potential, 0.0)
    assert abs(op.matrix - op.matrix.T).max() == 0.0


@pytest.mark.parametrize("a,index", [(0.5, 0), (2.0, 1)])
def test_catenoid_index(a, index):
    patch = catenoid(a)
    rep = spectrum(assemble_jacobi(patch, triangulate(patch, 32, 32)), 4)
    assert rep.index == index


def test_catenoid_transition_matches_root():
    a_star = index_transition(catenoid, 0.5, 2.0, 32, 32, xtol=1e-3)
    assert abs(a_star - CATENOID_T0) / CATENOID_T0 < 0.02
    with pytest.raises(ValueError):
        index_transition(catenoid, 0.3, 0.6, 16, 16)


def test_sym_basis_is_orthonormal():
    S = sym_basis(4)
    G = np.einsum("aij,bij->ab", S, S)
    np.testing.assert_allclose(G, np.eye(10), atol=1e-15)


@pytest.mark.parametrize("k", [(1, 0, 0, 0), (1, -1, 0, 0), (1, 1, 1, -1)])
def test_tt_basis_counts_and_constraints(k):
    b = tt_basis(k)
    assert b.dim == 5
    assert b.constraint_residual() < 1e-14


def test_lichnerowicz_torus_spectrum():
    rep, bases = lichnerowicz_torus_spectrum(1.0, 1)
    ev = rep.eigenvalues
    zero = np.abs(ev) <= 1e-12
    assert zero.sum() == 9
    assert abs(ev[~zero].min() - (2 * np.pi) ** 2) < 1e-9
    assert {b.dim for b in bases if any(b.k)} == {5}
    assert rep.index == 0
    assert len(ev) == 9 + 5 * (3**4 - 1)


def test_lichnerowicz_eigenvalue_matches_fourier_oracle():
    # on the flat torus the operator on TT tensors is the rough Laplacian acting componentwise
    side, k = 2.0, np.array([1, -1, 0, 1])
    B = tt_basis(k).basis[0]
    m = 8
    x = np.arange(m) * side / m
    grid = np.stack(np.meshgrid(x, x, x, x, indexing="ij"), axis=-1)
    phase = np.cos(2 * np.pi * grid @ k / side)
    h = phase[..., None, None] * B
    freqs = 2 * np.pi * np.fft.fftfreq(m, side / m)
    K2 = sum(np.meshgrid(*[freqs**2] * 4, indexing="ij"))
    lap = np.real(np.fft.ifftn(K2[..., None, None] * np.fft.fftn(h, axes=range(4)), axes=range(4)))
    lam = np.sum(lap * h) / np.sum(h * h)
    rep, _ = lichnerowicz_torus_spectrum(side, 1)
    ev = rep.eigenvalues
    assert abs(lam - (2 * np.pi / side) ** 2 * 3) < 1e-9
    assert np.sum(np.isclose(ev, lam, rtol=1e-12)) == 5 * 32  # |k|^2 = 3 modes


def test_lichnerowicz_rejects_bad_arguments():
    with pytest.raises(ValueError):
        lichnerowicz_torus_spectrum(0.0)
    with pytest.raises(ValueError):
        lichnerowicz_torus_spectrum(1.0, 0)


def test_spectrum_csvs(tmp_path):
    reps = {"a": make_report([1.0, 2.0]), "b": make_report([-1.0])}
    s = write_spectrum_csv(reps, tmp_path / "s.csv").read_text().splitlines()
    assert s == ["problem_id,i,eigenvalue", "a,0,1.0", "a,1,2.0", "b,0,-1.0"]
    idx = write_index_csv(reps, tmp_path / "i.csv").read_text().splitlines()
    assert idx[0] == "problem_id,operator_size,index,tol_neg,lambda_1"
    assert idx[2].startswith("b,1,1,")
