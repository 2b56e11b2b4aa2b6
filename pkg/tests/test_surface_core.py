import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from geoparallels.surface_core import (
    DegenerateImmersionError,
    DegenerateTriangleError,
    GraphFunction,
    NonOrientableMeshError,
    ParametricPatch,
    TriangleMesh,
    bour,
    catenoid,
    enneper,
    evaluate_forms,
    helicoid,
    icosphere,
    mesh_area,
    mesh_mean_curvature,
    msq_residual,
    paraboloid_graph,
    plane,
    read_obj,
    read_off,
    scherk_graph,
    sphere,
    sphere_curvature_ladder,
    torus,
    triangulate,
    write_curvature_csv,
    write_obj,
    write_off,
)

MINIMAL = [catenoid, enneper, bour, plane]


def _sympy_forms(expr_xyz, u0, v0):
    """Fundamental forms of a symbolic immersion, evaluated at (u0, v0)."""
    u, v = sp.symbols("u v", real=True)
    X = sp.Matrix(expr_xyz(u, v))
    Xu, Xv = X.diff(u), X.diff(v)
    n = Xu.cross(Xv)
    n = n / sp.sqrt(n.dot(n))
    E, F, G = Xu.dot(Xu), Xu.dot(Xv), Xv.dot(Xv)
    e, f, g = -X.diff(u, 2).dot(n), -X.diff(u, v).dot(n), -X.diff(v, 2).dot(n)
    H = (e * G - 2 * f * F + g * E) / (2 * (E * G - F**2))
    K = (e * g - f**2) / (E * G - F**2)
    sub = {u: u0, v: v0}
    return {k: float(val.subs(sub).evalf()) for k, val in dict(E=E, F=F, G=G, e=e, f=f, g=g, H=H, K=K).items()}


def test_catenoid_forms_match_symbolic_differentiation(rng):
    cat = lambda u, v: (sp.cosh(v) * sp.cos(u), sp.cosh(v) * sp.sin(u), v)
    for u0, v0 in rng.uniform(-0.9, 0.9, (5, 2)):
        ref = _sympy_forms(cat, u0, v0)
        ff = evaluate_forms(catenoid(), u0, v0)
        for k, val in ref.items():
            assert getattr(ff, k) == pytest.approx(val, abs=1e-12)


def test_enneper_forms_match_symbolic_differentiation(rng):
    enn = lambda u, v: (u - u**3 / 3 + u * v**2, v - v**3 / 3 + v * u**2, u**2 - v**2)
    for u0, v0 in rng.uniform(-0.9, 0.9, (3, 2)):
        ref = _sympy_forms(enn, u0, v0)
        ff = evaluate_forms(enneper(), u0, v0)
        assert ff.K == pytest.approx(ref["K"], rel=1e-10)
        assert abs(ff.H) <= 1e-10 and abs(ref["H"]) <= 1e-12


def test_catenoid_neck_principal_curvatures():
    ff = evaluate_forms(catenoid(), 0.0, 0.0)
    assert (ff.k1, ff.k2, ff.H, ff.a2) == pytest.approx((1.0, -1.0, 0.0, 2.0), abs=1e-14)


def test_sphere_equator_is_umbilic():
    ff = evaluate_forms(sphere(), np.pi / 2, 0.3)
    assert (abs(ff.k1), abs(ff.k2), abs(ff.H), ff.K) == pytest.approx((1, 1, 1, 1), abs=1e-12)


def test_plane_has_zero_second_form():
    ff = evaluate_forms(plane(), 0.3, -0.7)
    assert ff.H == 0 and ff.K == 0


@pytest.mark.parametrize("factory", MINIMAL)
def test_minimal_patches_have_vanishing_mean_curvature(factory, rng):
    p = factory()
    u0, u1, v0, v1 = p.domain
    ff = evaluate_forms(p, rng.uniform(u0, u1, 1000), rng.uniform(v0, v1, 1000))
    assert np.max(np.abs(ff.H)) <= 1e-10


@settings(max_examples=50, deadline=None)
@given(
    st.sampled_from([catenoid, enneper, bour, helicoid, torus, sphere]),
    st.floats(0.05, 0.95),
    st.floats(0.05, 0.95),
)
def test_curvature_identities_hold_pointwise(factory, a, b):
    p = factory()
    u0, u1, v0, v1 = p.domain
    ff = evaluate_forms(p, u0 + a * (u1 - u0), v0 + b * (v1 - v0))
    scale = max(1.0, ff.a2)
    assert ff.H**2 >= ff.K - 1e-14 * scale
    assert ff.a2 == pytest.approx(4 * ff.H**2 - 2 * ff.K, abs=1e-12 * scale)


@pytest.mark.parametrize("factory", [catenoid, enneper, bour])
def test_analytic_derivatives_agree_with_central_differences(factory, rng):
    p = factory()
    fd = ParametricPatch("fd", p.domain, p.position)
    u0, u1, v0, v1 = p.domain
    U = rng.uniform(u0 + 0.1, u1 - 0.1, 20)
    V = rng.uniform(v0 + 0.1, v1 - 0.1, 20)
    for a, b in zip(p.first_derivatives(U, V), fd.first_derivatives(U, V)):
        assert np.max(np.abs(a - b)) < 1e-8
    for a, b in zip(p.second_derivatives(U, V), fd.second_derivatives(U, V)):
        assert np.max(np.abs(a - b)) < 1e-5


def test_degenerate_immersion_is_rejected():
    line = ParametricPatch("line", (0, 1, 0, 1), lambda u, v: np.stack([u, u, 0 * v], -1))
    with pytest.raises(DegenerateImmersionError):
        evaluate_forms(line, 0.5, 0.5)


def test_msq_residual_examples(rng):
    x, y = rng.uniform(-0.9, 0.9, (2, 50))
    zero = lambda x, y: np.zeros_like(x)

    c = GraphFunction("const", lambda x, y: 3 + zero(x, y), zero, zero, zero, zero, zero, (-1, 1, -1, 1))
    assert np.all(msq_residual(c, x, y) == 0)
    sq = GraphFunction(
        "x2", lambda x, y: x**2, lambda x, y: 2 * x, zero, lambda x, y: 2 + zero(x, y), zero, zero, (-1, 1, -1, 1)
    )
    assert np.allclose(msq_residual(sq, x, y), 2.0, atol=0)
    assert np.max(np.abs(msq_residual(scherk_graph(), x, y))) < 1e-8
    assert np.min(msq_residual(paraboloid_graph(), x, y)) >= 1


def test_scherk_residual_matches_symbolic_substitution():
    X, Y = sp.symbols("x y", real=True)
    u = sp.log(sp.cos(X)) - sp.log(sp.cos(Y))
    expr = (1 + u.diff(X) ** 2) * u.diff(Y, 2) - 2 * u.diff(X) * u.diff(Y) * u.diff(X, Y) + (1 + u.diff(Y) ** 2) * u.diff(X, 2)
    assert sp.simplify(expr) == 0


def test_plane_grid_counts():
    m = triangulate(plane(), 2, 2)
    assert len(m.triangles) == 8 and m.euler_characteristic == 1


def test_closed_triangulations_have_expected_euler_characteristic():
    s = triangulate(sphere(), 16, 16)
    t = triangulate(torus(), 16, 16)
    assert s.is_closed and s.euler_characteristic == 2
    assert t.is_closed and t.euler_characteristic == 0


def test_catenoid_mesh_area_near_closed_form():
    # int_{-1}^{1} 2 pi cosh^2 v dv
    exact = 2 * np.pi * (1 + np.sinh(1) * np.cosh(1))
    assert mesh_area(triangulate(catenoid(), 128, 128)) == pytest.approx(exact, rel=1e-2)


def test_unit_square_area():
    m = TriangleMesh([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], [[0, 1, 2], [0, 2, 3]])
    assert mesh_area(m) == pytest.approx(1.0, abs=1e-15)


def test_sphere_mesh_area_converges():
    assert mesh_area(icosphere(4)) == pytest.approx(4 * np.pi, rel=5e-3)


def test_planar_interior_mean_curvature_is_zero():
    mc = mesh_mean_curvature(triangulate(plane(), 12, 12))
    assert np.all(mc.H[~mc.flagged] == 0.0)
    assert np.all(mc.flagged == triangulate(plane(), 12, 12).boundary)


def test_sphere_ladder_observed_order():
    lad = sphere_curvature_ladder((2, 3, 4))
    assert np.all(lad.orders >= 1.7)
    assert np.all(np.diff(lad.errors) < 0)


def test_catenoid_mesh_curvature_decreases_under_refinement():
    errs = []
    for n in (16, 32, 64):
        mc = mesh_mean_curvature(triangulate(catenoid(), n, n))
        errs.append(np.nanmax(np.abs(mc.H)))
    assert errs[0] > errs[1] > errs[2]
    assert np.log2(errs[1] / errs[2]) > 1.5


def test_inconsistent_winding_is_rejected():
    with pytest.raises(NonOrientableMeshError):
        TriangleMesh([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], [[0, 1, 2], [0, 3, 2], [0, 2, 3]])


def test_degenerate_triangle_is_rejected():
    with pytest.raises(DegenerateTriangleError):
        TriangleMesh([[0, 0, 0], [1, 0, 0], [2, 0, 0]], [[0, 1, 2]])


def test_off_and_obj_round_trip(tmp_path):
    m = icosphere(2)
    for write, read, ext in ((write_off, read_off, "off"), (write_obj, read_obj, "obj")):
        back = read(write(m, tmp_path / f"m.{ext}"))
        assert np.array_equal(back.vertices, m.vertices)
        assert np.array_equal(back.triangles, m.triangles)


def test_curvature_csv_columns(tmp_path):
    m = triangulate(plane(), 4, 4)
    lines = write_curvature_csv(m, tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "vid,x,y,z,H,K"
    assert len(lines) == m.n_vertices + 1
