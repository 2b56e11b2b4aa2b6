import numpy as np
import pytest
import sympy as sy
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from geoparallels.chart_lab import (
    ChartError, CurvatureError, PartialBallError, TopologicalData, curvature_at, einstein_hilbert,
    einstein_residual, euler_from_cells, fd_derivatives, flat, flat_torus, fubini_study, geodesic_ball_volume,
    get_chart, hitchin_thorpe, hyperbolic, kahler_compat_check, laplace_beltrami, nabla_rm_norm, perturbed,
    product_s2xs2, regularity_probe, round_sphere, sectional_curvature, sphere_quadrature, volume_ratio_profile,
)

S3_AREA = 2 * np.pi**2
POINT = np.array([0.3, -0.2, 0.1, 0.25])


# ---------------------------------------------------------------- finite differences


@pytest.mark.parametrize("order,degree", [(2, 2), (4, 4), (8, 8)])
def test_stencils_exact_on_polynomials(order, degree, rng):
    # central stencils of order p differentiate polynomials of degree <= p exactly
    c = rng.normal(size=4)

    def f(X):
        return (X @ c)[:, None] ** degree

    X = rng.normal(size=(3, 4)) * 0.5
    val, df, ddf = fd_derivatives(f, X, 0.1, order)
    s = X @ c
    np.testing.assert_allclose(df[:, :, 0], degree * s[:, None] ** (degree - 1) * c, rtol=1e-9, atol=1e-9)
    hess = degree * (degree - 1) * s[:, None, None] ** (degree - 2) * np.outer(c, c)
    np.testing.assert_allclose(ddf[..., 0], hess, rtol=1e-7, atol=1e-7)


def test_constant_differentiates_to_zero():
    _, df, ddf = fd_derivatives(lambda X: np.full((len(X), 2), 3.7), np.zeros((2, 4)), 1e-3)
    assert np.all(df == 0) and np.all(ddf == 0)


# ---------------------------------------------------------------- curvature oracles


def _constant_curvature_rm(g, K):
    # R_ijkl = K (g_ik g_jl - g_il g_jk), so that R(X, Y, X, Y) / |X ^ Y|^2 = K
    return K * (np.einsum("ik,jl->ijkl", g, g) - np.einsum("il,jk->ijkl", g, g))


@pytest.mark.parametrize("chart,K", [(round_sphere(), 1.0), (hyperbolic(), -1.0), (flat(), 0.0)])
def test_constant_curvature_tensor(chart, K):
    p = curvature_at(chart, POINT)
    ref = _constant_curvature_rm(p.metric, K)
    scale = max(1.0, np.abs(ref).max())
    assert np.abs(p.riemann - ref).max() / scale < 1e-5
    # sectional curvature sign convention
    assert abs(sectional_curvature(chart, POINT, [1, 0, 0, 0], [0, 1, 0.5, 0]) - K) < 1e-5


def test_s4_invariants():
    p = curvature_at(round_sphere(), POINT)
    # second-order stencils at the default step leave a relative error near 1e-6
    assert abs(p.scalar - 12) < 1e-4
    assert abs(p.rm_norm2 - 24) < 1e-3
    e = einstein_residual(round_sphere(), POINT)
    assert abs(e.lam - 3) < 1e-4 and e.normalized < 1e-5


def test_fubini_study_curvatures():
    chart = fubini_study()
    x = np.array([0.2, -0.1, 0.3, 0.15])
    p = curvature_at(chart, x)
    assert abs(p.scalar - 24) < 1e-4
    e = einstein_residual(chart, x)
    assert abs(e.lam - 6) < 1e-4 and e.normalized < 1e-4
    J = chart.J
    X = np.array([1.0, 0.3, -0.2, 0.5])
    assert abs(sectional_curvature(chart, x, X, J @ X) - 4) < 1e-4
    # at the origin the real span of e1 and e3 is totally real
    assert abs(sectional_curvature(chart, np.zeros(4), [1, 0, 0, 0], [0, 0, 1, 0]) - 1) < 1e-4


def test_product_curvature():
    p = curvature_at(product_s2xs2(), POINT)
    assert abs(p.scalar - 4) < 1e-5
    e = einstein_residual(product_s2xs2(), POINT)
    assert abs(e.lam - 1) < 1e-5 and e.normalized < 1e-5


def test_perturbed_scalar_curvature_matches_symbolic():
    # 2D factor dx1^2 + f^2 dx2^2 has K = -f''/f; R = 2K
    x1, c = sy.symbols("x1 c", real=True)
    f = sy.sqrt(1 + c * x1**2)
    R = sy.lambdify((x1, c), -2 * sy.diff(f, x1, 2) / f)
    for coef in (0.5, 1.3):
        p = curvature_at(perturbed(coef), POINT)
        assert abs(p.scalar - R(POINT[0], coef)) < 1e-6
    e = einstein_residual(perturbed(), POINT)
    assert e.normalized > 1e-2


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["flat", "s4", "fs", "s2xs2", "hyperbolic", "perturbed", "bump", "diag"]),
       st.lists(st.floats(-0.5, 0.5), min_size=4, max_size=4))
def test_bianchi_and_symmetries(name, x):
    p = curvature_at(get_chart(name), np.array(x))
    assert p.bianchi_residual < 1e-6 * max(1.0, np.abs(p.riemann).max())
    assert p.symmetry_residual < 1e-9 * max(1.0, np.abs(p.riemann).max())


def test_nabla_rm():
    for chart, x in [(flat(), POINT), (round_sphere(), POINT), (fubini_study(), POINT)]:
        assert nabla_rm_norm(chart, x) < 1e-3
    assert nabla_rm_norm(perturbed(), POINT) > 1e-1


def test_curvature_rejects_bad_points():
    with pytest.raises(ChartError):
        curvature_at(hyperbolic(), np.array([0.95, 0, 0, 0]))
    with pytest.raises(ChartError):
        curvature_at(flat(), np.zeros(3))

    def bad(X):
        G = np.broadcast_to(np.eye(4), X.shape[:-1] + (4, 4)).copy()
        G[..., 0, 0] = -1
        return G

    from dataclasses import replace

    with pytest.raises(CurvatureError):
        curvature_at(replace(flat(), metric=bad), POINT)


def test_laplace_beltrami_on_sphere_coordinates():
    # restrictions of linear functions of R^5 are eigenfunctions with eigenvalue n = 4
    chart = round_sphere()

    def embed(X):
        s = np.sum(X * X, axis=-1, keepdims=True)
        return np.concatenate([2 * X, 1 - s], axis=-1) / (1 + s)

    X = np.array([POINT, -0.5 * POINT])
    f, lap = laplace_beltrami(chart, embed, X)
    np.testing.assert_allclose(lap, 4 * f, atol=1e-6)


# ---------------------------------------------------------------- functionals


def test_einstein_hilbert_sphere_value():
    eh = einstein_hilbert(round_sphere())
    exact = 12 * np.sqrt(8 * np.pi**2 / 3)
    assert abs(eh.value - exact) / exact < 5e-3
    assert abs(eh.volume - 8 * np.pi**2 / 3) / (8 * np.pi**2 / 3) < 2e-3


@pytest.mark.parametrize("chart", [round_sphere(), flat_torus(), product_s2xs2(), fubini_study(), hyperbolic()])
def test_einstein_hilbert_scale_invariance(chart):
    a = einstein_hilbert(chart)
    b = einstein_hilbert(chart.scaled(3.0))
    assert abs(a.value - b.value) / max(1.0, abs(a.value)) < 1e-10


@pytest.mark.parametrize("chart,R", [(fubini_study(), 24.0), (product_s2xs2(), 4.0)])
def test_einstein_hilbert_constant_scalar_charts(chart, R):
    eh = einstein_hilbert(chart)
    assert abs(eh.volume / chart.model_volume - 1) < 1e-12
    exact = R * np.sqrt(chart.model_volume)
    assert abs(eh.value - exact) / exact < 1e-5


def test_einstein_hilbert_torus_vanishes():
    eh = einstein_hilbert(flat_torus(2.0))
    assert eh.total_scalar == 0.0
    assert abs(eh.volume - 16) < 1e-12


def test_kahler_compatibility():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-1, 1, size=(20, 4))
    assert kahler_compat_check(fubini_study(), pts) < 1e-14
    assert kahler_compat_check(flat(), pts) == 0.0
    assert kahler_compat_check(perturbed(), pts) > 1e-2
    with pytest.raises(ChartError):
        kahler_compat_check(hyperbolic(), pts)


@pytest.mark.parametrize("sig,chi,ok", [(0, 2, True), (1, 3, True), (5, 3, False), (-3, 4, False), (-2, 3, True)])
def test_hitchin_thorpe(sig, chi, ok):
    assert hitchin_thorpe(TopologicalData(sig, chi)) is ok


def test_euler_from_cells():
    assert euler_from_cells([1, 0, 0, 0, 1]) == 2  # S^4
    assert euler_from_cells([1, 4, 6, 4, 1]) == 0  # T^4
    assert TopologicalData.from_cells(1, [1, 0, 1, 0, 1]).euler == 3  # CP^2
    assert TopologicalData.from_cells(0, [1, 0, 2, 0, 1]).euler == 4  # S^2 x S^2
    with pytest.raises(ValueError):
        TopologicalData(0, 5, (1, 0, 0, 0, 1))
    with pytest.raises(ValueError):
        euler_from_cells([1, -1])


# ---------------------------------------------------------------- geodesic balls


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sphere_quadrature_moments(n):
    dirs, w = sphere_quadrature(n, 6)
    area = 2 * np.pi ** (n / 2) / __import__("math").gamma(n / 2)
    assert abs(w.sum() - area) < 1e-12
    np.testing.assert_allclose(np.linalg.norm(dirs, axis=1), 1.0, atol=1e-14)
    assert abs(w @ dirs[:, 0] ** 2 - area / n) < 1e-12
    assert abs(w @ dirs[:, -1] ** 4 - 3 * area / (n * (n + 2))) < 1e-12


def test_flat_ball_volume():
    v = geodesic_ball_volume(flat(), np.zeros(4), 1.3)
    assert abs(v - np.pi**2 / 2 * 1.3**4) < 1e-9


def test_sphere_ball_volume_matches_integral():
    r = 1.0
    ref = S3_AREA * quad(lambda t: np.sin(t) ** 3, 0, r)[0]
    v = geodesic_ball_volume(round_sphere(), np.zeros(4), r)
    assert abs(v - ref) / ref < 1e-6


def test_volume_ratio_verdicts():
    radii = [0.2, 0.4, 0.6, 0.8]
    prof = volume_ratio_profile(flat(), np.zeros(4), radii)
    assert prof.verdict == "constant"
    np.testing.assert_allclose(prof.values, np.pi**2 / 2, atol=1e-6)
    assert volume_ratio_profile(round_sphere(), np.zeros(4), radii).verdict == "decreasing"
    hyp = volume_ratio_profile(hyperbolic(), np.zeros(4), [0.1, 0.2, 0.3, 0.4])
    assert hyp.verdict == "increasing"
    with pytest.raises(ValueError):
        volume_ratio_profile(flat(), np.zeros(4), [0.5, 0.2])


def test_small_ball_ratio_tends_to_euclidean():
    prof = volume_ratio_profile(round_sphere(), np.zeros(4), [0.01, 0.02])
    # Vol/r^4 = (pi^2/2)(1 - R r^2 / (6 (n + 2)) + ...)
    np.testing.assert_allclose(prof.values, np.pi**2 / 2 * (1 - 12 * np.array([0.01, 0.02]) ** 2 / 36), rtol=1e-7)


def test_partial_ball_errors():
    with pytest.raises(PartialBallError):
        geodesic_ball_volume(hyperbolic(), np.zeros(4), 5.0)
    with pytest.raises(PartialBallError):
        geodesic_ball_volume(flat_torus(1.0), np.zeros(4), 0.6)
    with pytest.raises(ValueError):
        geodesic_ball_volume(flat(), np.zeros(4), -1.0)


def test_regularity_probe_flat_and_sphere():
    flat_probe = regularity_probe(flat(), np.zeros(4), 0.5, resolution=4)
    assert flat_probe.energy == 0.0 and flat_probe.peak == 0.0
    r = 0.5
    probe = regularity_probe(round_sphere(), np.zeros(4), r, resolution=4)
    vol = S3_AREA * quad(lambda t: np.sin(t) ** 3, 0, r)[0]
    assert abs(probe.energy - 24 * vol) / (24 * vol) < 1e-2
    assert abs(probe.peak - np.sqrt(24) * (r / 2) ** 2) < 1e-3
