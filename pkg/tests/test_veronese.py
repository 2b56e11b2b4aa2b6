import numpy as np
import pytest
from scipy.linalg import orthogonal_procrustes
from scipy.stats import ortho_group

from geoparallels.veronese_lab import (
    CertificationError, HermitianTraceless3, ProjPoint, ProjectiveError, clifford_torus, eigenmap,
    fiber_pairing, fs_chart, hermitian_coordinates, hopf_project, horizontality_residual, lift_differential,
    monomials, projector_immersion, projector_map, projector_pullback, projector_span_probe, pullback_ratio,
    random_points, s2_chart, span_rank_probe, sphere_identity, takahashi_certify, torus_chart, veronese,
    veronese_fs_pullback, veronese_lift,
)


@pytest.fixture
def points(rng):
    return random_points(50, rng)


def _chart_samples(rng, n=40, spread=0.8):
    return rng.uniform(-spread, spread, size=(n, 4))


# ---------------------------------------------------------------- projective points


def test_projpoint_is_scale_invariant(rng):
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    a = ProjPoint(z)
    b = ProjPoint((2 - 3j) * z)
    np.testing.assert_allclose(a.coords, b.coords, atol=1e-15)
    assert a.isclose(b) and a.dim == 2
    assert abs(np.linalg.norm(a.coords) - 1) < 1e-15
    with pytest.raises(ProjectiveError):
        ProjPoint(np.zeros(3))


def test_chart_round_trip(points):
    for p in points[:10]:
        assert ProjPoint.from_chart(p.chart()).isclose(p)
    with pytest.raises(ProjectiveError):
        ProjPoint([0, 1, 1j]).chart()


def test_monomials_and_weighted_norm(rng):
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    m = monomials(z)
    assert m[1] == z[0] * z[1] and m[5] == z[2] ** 2
    # the sqrt(2)-weighted monomials are the symmetric tensor z (x) z in an orthonormal basis
    assert abs(np.linalg.norm(monomials(z, weighted=True)) - np.linalg.norm(z) ** 2) < 1e-12


def test_lift_is_unit_and_projects_back(points):
    for p in points:
        for weighted in (False, True):
            L = veronese_lift(p, weighted)
            assert abs(np.linalg.norm(L) - 1) < 1e-12
            assert hopf_project(L).isclose(veronese(p, weighted), atol=1e-15)
    with pytest.raises(ProjectiveError):
        hopf_project(2 * veronese_lift(points[0]))


def test_lift_phase_doubles(rng):
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    t = 0.37
    np.testing.assert_allclose(veronese_lift(np.exp(1j * t) * z), np.exp(2j * t) * veronese_lift(z), atol=1e-15)


@pytest.mark.parametrize("weighted", [False, True])
@pytest.mark.parametrize("representative", ["chart", "horizontal"])
def test_lift_differential_matches_finite_differences(points, rng, weighted, representative):
    from geoparallels.veronese_lab.projective import _representative_tangent

    for p in points[:5]:
        v = rng.normal(size=4)
        Z, dZ = _representative_tangent(p, v, representative)
        L, dL = lift_differential(p, v, weighted, representative)
        h = 1e-5
        if representative == "chart":
            curve = lambda t: veronese_lift(Z + t * dZ, weighted)  # noqa: E731
        else:
            curve = lambda t: veronese_lift((Z + t * dZ) / np.linalg.norm(Z + t * dZ), weighted)  # noqa: E731
        fd = (curve(h) - curve(-h)) / (2 * h)
        np.testing.assert_allclose(L, curve(0.0), atol=1e-14)
        np.testing.assert_allclose(dL, fd, atol=1e-8)


def test_fiber_pairing():
    w = np.array([1, 0, 0, 0, 0, 0], complex)
    assert fiber_pairing(w, 1j * w) == 1.0
    assert fiber_pairing(w, np.array([0, 1, 0, 0, 0, 0], complex)) == 0.0
    assert fiber_pairing(w, np.zeros(6)) == 0.0


def test_horizontality(points, rng):
    weighted = [horizontality_residual(p, rng.normal(size=4), True, "horizontal") for p in points]
    assert max(weighted) < 1e-10
    # the plain monomial lift along affine representatives is not horizontal
    plain = [horizontality_residual(p, rng.normal(size=4)) for p in points]
    assert max(plain) > 1e-2


# ---------------------------------------------------------------- projector immersion


def test_hermitian_basis_coordinates(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    H = A + A.conj().T
    c = hermitian_coordinates(H)
    assert abs(np.linalg.norm(c) - np.linalg.norm(H)) < 1e-12
    T = H - np.trace(H) / 3 * np.eye(3)
    M = HermitianTraceless3(T)
    np.testing.assert_allclose(HermitianTraceless3.from_coords(M.coords).matrix, T, atol=1e-12)
    with pytest.raises(ValueError):
        HermitianTraceless3(H)
    with pytest.raises(ValueError):
        HermitianTraceless3(A - np.trace(A) / 3 * np.eye(3))


def test_projector_immersion_unit_and_injective(points):
    imgs = [projector_immersion(p) for p in points]
    assert max(abs(x.norm - 1) for x in imgs) < 1e-12
    C = np.array([x.coords for x in imgs])
    d = np.linalg.norm(C[:, None] - C[None], axis=-1)
    assert np.min(d[~np.eye(len(C), dtype=bool)]) > 1e-3
    np.testing.assert_allclose(projector_map(np.array([p.chart() for p in points])), C, atol=1e-12)


def test_projector_pullback_is_three_fs(points, rng):
    g = fs_chart()
    ratios = []
    for p in points:
        np.testing.assert_allclose(projector_pullback(p), 3 * g.metric(p.chart()[None])[0], atol=1e-12)
        ratios.append(pullback_ratio(p, rng.normal(size=4), rng.normal(size=4)))
    ratios = np.array(ratios)
    ratios = ratios[np.isfinite(ratios)]
    assert abs(ratios.mean() - 3) < 1e-12
    assert ratios.std() / ratios.mean() < 1e-6


def test_pullback_ratio_undefined_on_orthogonal_pair():
    p = ProjPoint([1, 0, 0])
    assert np.isnan(pullback_ratio(p, [1, 0, 0, 0], [0, 1, 0, 0]))


def test_weighted_veronese_pullback_is_twice_fs(points):
    g = fs_chart()
    for p in points[:10]:
        G = g.metric(p.chart()[None])[0]
        np.testing.assert_allclose(veronese_fs_pullback(p, weighted=True), 2 * G, atol=1e-12)
    plain = veronese_fs_pullback(points[0]) / g.metric(points[0].chart()[None])[0]
    assert not np.allclose(plain[np.eye(4, dtype=bool)], 2.0)


# ---------------------------------------------------------------- Takahashi certification


def test_takahashi_cp2(rng):
    rep = takahashi_certify(projector_map, fs_chart(), _chart_samples(rng))
    assert abs(rep.lambda_fit - 12) / 12 < 0.02
    assert rep.residual < 1e-6
    assert abs(rep.pullback - 3) < 1e-8 and rep.pullback_cv < 1e-6
    assert abs(rep.lambda_induced - 4) < 1e-6
    assert rep.radius_check < 1e-3 and abs(rep.sphere_radius - 1) < 1e-12
    assert rep.colinearity < 1e-6


def test_takahashi_s2_and_clifford(rng):
    s2 = takahashi_certify(sphere_identity, s2_chart(), rng.uniform(-1.5, 1.5, (30, 2)))
    assert abs(s2.lambda_fit - 2) < 1e-6 and s2.residual < 1e-6 and s2.radius_check < 1e-3
    tor = takahashi_certify(clifford_torus, torus_chart(), rng.uniform(0, 2 * np.pi, (30, 2)))
    assert abs(tor.lambda_fit - 1) < 1e-6 and abs(tor.pullback - 0.5) < 1e-8
    assert tor.radius_check < 1e-3


def test_takahashi_rejects_vanishing_map(rng):
    with pytest.raises(CertificationError):
        takahashi_certify(lambda X: np.zeros((len(X), 3)), s2_chart(), rng.uniform(-1, 1, (5, 2)))


def test_eigenmap_recovers_projector_up_to_rotation(rng):
    Q = ortho_group.rvs(8, random_state=7)
    basis = [lambda X, k=k: 5.0 * (projector_map(X) @ Q)[:, k] for k in range(8)]
    X = _chart_samples(rng, 30)
    imm = eigenmap(basis, fs_chart(), X)
    Y = rng.uniform(-1, 1, (20, 4))
    A, B = imm(Y), projector_map(Y)
    R, _ = orthogonal_procrustes(A, B)
    # the eigenmap is isometric for g, the projector immersion for 3 g
    assert np.max(np.abs(np.sqrt(3) * A @ R - B)) < 1e-6


def test_eigenmap_rejects_bad_bases(rng):
    X = rng.uniform(-1, 1, (20, 2))
    squares = [lambda P, k=k: sphere_identity(P)[:, k] ** 2 for k in range(3)]
    with pytest.raises(CertificationError):
        eigenmap(squares, s2_chart(), X)
    with pytest.raises(CertificationError):
        eigenmap([lambda P: np.ones(len(P))], s2_chart(), X)


# ---------------------------------------------------------------- span probes


def test_span_ranks(rng):
    assert span_rank_probe(200, rng).rank == 12
    assert span_rank_probe(200, rng, weighted=True).rank == 12
    # canonical representatives make the first lift coordinate real
    assert span_rank_probe(200, rng, representative="canonical").rank == 11
    proj = projector_span_probe(200, rng)
    assert (proj.rank, proj.affine_rank) == (9, 8)
    with pytest.raises(ValueError):
        span_rank_probe(5, rng)
