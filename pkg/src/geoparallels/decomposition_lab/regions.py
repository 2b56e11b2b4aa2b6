"""Intersections of a parametric surface with ambient balls.

A region ``Sigma n B(p, r)`` is described in parameter space in one of
three ways:

* ``polar``: ``p`` lies on the surface at parameters ``c`` and the region is
  star-shaped about ``c``; each ray ``c + rho (cos phi, sin phi)`` is cut at
  its first exit from the ball.
* ``band``: ``p`` is off the surface and the patch is periodic in u; every
  u-line meets the ball in one v-interval (tubes around an axis point).
* ``whole``: the ball contains the whole patch (``r = inf``).

Exit points are refined by vectorized bisection, the radial (or v)
integrals use Gauss-Legendre nodes and the periodic outer integral uses the
trapezoid rule, doubled until the area settles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..surface_core.mesh import TriangleMesh, triangulate
from ..surface_core.patches import ParametricPatch

__all__ = ["RefinementError", "locate", "BallRegion", "ball_region", "region_area"]

ON_SURFACE_TOL = 1e-9
RAY_SAMPLES = 64
BISECTIONS = 60
GAUSS_NODES = 16


class RefinementError(RuntimeError):
    """The region boundary could not be resolved."""


def locate(patch: ParametricPatch, p, guess=None) -> tuple[np.ndarray, float]:
    """Parameters of the surface point nearest to ``p`` and the distance."""
    p = np.asarray(p, float)
    u0, u1, v0, v1 = patch.domain
    if guess is None:
        U, V = np.meshgrid(np.linspace(u0, u1, 65), np.linspace(v0, v1, 65), indexing="ij")
        d = np.sum((patch(U, V) - p) ** 2, axis=-1)
        i = np.unravel_index(np.argmin(d), d.shape)
        guess = (U[i], V[i])
    bounds = [None if patch.periodic[0] else (u0, u1), None if patch.periodic[1] else (v0, v1)]
    res = minimize(
        lambda q: float(np.sum((patch(q[0], q[1]) - p) ** 2)),
        np.asarray(guess, float), method="L-BFGS-B",
        bounds=[b or (None, None) for b in bounds], options={"ftol": 1e-30, "gtol": 1e-14},
    )
    q = np.asarray(res.x)
    return q, float(np.sqrt(np.sum((patch(q[0], q[1]) - p) ** 2)))


def _bisect(fun, lo, hi):
    """Vectorized bisection for a sign change from negative at lo to >= 0 at hi."""
    for _ in range(BISECTIONS):
        mid = 0.5 * (lo + hi)
        neg = fun(mid) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BallRegion:
    patch: ParametricPatch
    p: np.ndarray
    r: float
    mode: str  # polar | band | whole | empty
    center: np.ndarray | None = None

    # ---------------------------------------------------------------- polar rays
    def _ray_limits(self, phi):
        c = self.center
        d = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        lim = np.full(phi.shape, np.inf)
        for ax in range(2):
            lo, hi = self.patch.domain[2 * ax], self.patch.domain[2 * ax + 1]
            comp = d[..., ax]
            with np.errstate(divide="ignore"):
                if self.patch.periodic[ax]:
                    t = 0.5 * (hi - lo) / np.abs(comp)
                else:
                    t = np.where(comp > 0, (hi - c[ax]) / comp, np.where(comp < 0, (lo - c[ax]) / comp, np.inf))
            lim = np.minimum(lim, t)
        return d, lim

    def ray_lengths(self, phi) -> np.ndarray:
        """Distance along each parameter ray to the first exit from the ball."""
        phi = np.asarray(phi, float)
        d, lim = self._ray_limits(phi)
        c, p, r2 = self.center, self.p, self.r**2

        def psi(rho, dd=d):
            q = c + rho[..., None] * dd
            return np.sum((self.patch(q[..., 0], q[..., 1]) - p) ** 2, axis=-1) - r2

        s = lim[:, None] * np.linspace(0, 1, RAY_SAMPLES + 1)[None, :]
        vals = psi(s, d[:, None, :])
        outside = vals >= 0
        first = np.where(outside.any(axis=1), outside.argmax(axis=1), RAY_SAMPLES + 1)
        # star-shape check: nothing inside the ball after the first exit
        after = np.arange(RAY_SAMPLES + 1)[None, :] > first[:, None]
        if np.any(after & ~outside):
            raise RefinementError("ball region is not star-shaped about its center")
        rho = lim.copy()
        hit = first <= RAY_SAMPLES
        if np.any(hit):
            k = first[hit]
            rows = np.flatnonzero(hit)
            rho[hit] = _bisect(lambda x: psi(x, d[hit]), s[rows, k - 1], s[rows, k])
        return rho

    # ---------------------------------------------------------------- bands
    def band_limits(self, u) -> tuple[np.ndarray, np.ndarray]:
        u = np.asarray(u, float)
        _, _, v0, v1 = self.patch.domain
        vs = np.linspace(v0, v1, 4 * RAY_SAMPLES + 1)
        r2 = self.r**2
        psi = lambda uu, vv: np.sum((self.patch(uu, vv) - self.p) ** 2, axis=-1) - r2  # noqa: E731
        vals = psi(u[:, None], vs[None, :])
        inside = vals < 0
        runs = np.sum(np.diff(inside.astype(int), axis=1) == 1, axis=1) + inside[:, 0]
        if np.any(runs != 1):
            raise RefinementError("u-lines do not meet the ball in exactly one interval")
        i0 = inside.argmax(axis=1)
        i1 = inside.shape[1] - 1 - inside[:, ::-1].argmax(axis=1)
        lo = np.where(i0 > 0, _bisect(lambda x: -psi(u, x) - 1e-300, vs[np.maximum(i0 - 1, 0)], vs[i0]), v0)
        hi = np.where(
            i1 < len(vs) - 1,
            _bisect(lambda x: psi(u, x), vs[i1], vs[np.minimum(i1 + 1, len(vs) - 1)]),
            v1,
        )
        return lo, hi

    # ---------------------------------------------------------------- quadrature
    def nodes(self, n_outer: int):
        """Quadrature points ``(U, V)`` and weights for ``int f dA`` at a given outer resolution."""
        x, w = np.polynomial.legendre.leggauss(GAUSS_NODES)
        x, w = 0.5 * (x + 1), 0.5 * w
        u0, u1, v0, v1 = self.patch.domain
        if self.mode == "polar":
            phi = 2 * np.pi * (np.arange(n_outer) + 0.5) / n_outer
            rho = self.ray_lengths(phi)
            R = rho[:, None] * x[None, :]
            U = self.center[0] + R * np.cos(phi)[:, None]
            V = self.center[1] + R * np.sin(phi)[:, None]
            W = (2 * np.pi / n_outer) * rho[:, None] * w[None, :] * R
        elif self.mode == "band":
            u = u0 + (u1 - u0) * (np.arange(n_outer) + 0.5) / n_outer
            lo, hi = self.band_limits(u)
            U = np.repeat(u[:, None], GAUSS_NODES, axis=1)
            V = lo[:, None] + (hi - lo)[:, None] * x[None, :]
            W = ((u1 - u0) / n_outer) * (hi - lo)[:, None] * w[None, :]
        elif self.mode == "whole":
            if self.patch.periodic[0]:
                u = u0 + (u1 - u0) * (np.arange(n_outer) + 0.5) / n_outer
                wu = np.full(n_outer, (u1 - u0) / n_outer)
            else:
                xs, ws = np.polynomial.legendre.leggauss(n_outer)
                u, wu = u0 + (u1 - u0) * 0.5 * (xs + 1), 0.5 * (u1 - u0) * ws
            U = np.repeat(u[:, None], GAUSS_NODES, axis=1)
            V = v0 + (v1 - v0) * np.broadcast_to(x, U.shape)
            W = wu[:, None] * (v1 - v0) * w[None, :]
        else:
            return np.zeros((0, 1)), np.zeros((0, 1)), np.zeros((0, 1))
        return U, V, W * self.patch.area_element(U, V)

    def integrate(self, f=None, tol: float = 1e-10, accept: float = 1e-6, n0: int = 64, n_max: int = 16384) -> float:
        """``int_region f dA`` (area when ``f`` is None), refining the outer rule.

        Doubling stops when successive values agree to ``tol``; if ``n_max`` is
        reached with a change above ``accept`` a RefinementError is raised.
        """
        if self.mode == "empty":
            return 0.0
        prev = None
        n = n0
        while True:
            U, V, W = self.nodes(n)
            val = float(np.sum(W if f is None else W * f(U, V)))
            if prev is not None:
                change = abs(val - prev)
                scale = max(abs(val), 1e-300)
                if change <= tol * scale:
                    return val
                if 2 * n > n_max:
                    if change <= accept * scale:
                        return val
                    raise RefinementError(f"region integral unsettled: change {change / scale:.2e} at n={n}")
            prev = val
            n *= 2

    def max_over(self, f, n_outer: int = 256) -> float:
        """Maximum of ``f`` over the quadrature nodes and the center."""
        if self.mode == "empty":
            return 0.0
        U, V, _ = self.nodes(n_outer)
        m = float(np.max(f(U, V)))
        if self.center is not None:
            m = max(m, float(f(np.array(self.center[0]), np.array(self.center[1]))))
        return m

    # ---------------------------------------------------------------- meshes
    def mesh(self, n_radial: int = 24, n_outer: int = 48) -> TriangleMesh:
        """A triangulation of the region carrying the original (u, v) parameters."""
        if self.mode == "polar":
            c = self.center
            cache: dict = {}

            def uv(t, phi):
                key = phi.tobytes()
                if key not in cache:
                    cache[key] = self.ray_lengths(phi.ravel()).reshape(phi.shape)
                rho = cache[key]
                return c[0] + t * rho * np.cos(phi), c[1] + t * rho * np.sin(phi)

            helper = ParametricPatch(
                "region", (0.0, 1.0, 0.0, 2 * np.pi), lambda t, phi: self.patch(*uv(t, phi)),
                periodic=(False, True),
            )
            m = triangulate(helper, n_radial, n_outer, wrap_u=False, wrap_v=True)
            t, phi = m.params[:, 0], m.params[:, 1]
            U, V = uv(t, phi)
        elif self.mode == "band":
            u0, u1 = self.patch.domain[:2]
            if not self.patch.periodic[0]:
                raise RefinementError("band meshes need a u-periodic patch")

            def uv(u, s):
                lo, hi = self.band_limits(u.ravel())
                lo, hi = lo.reshape(u.shape), hi.reshape(u.shape)
                return u, lo + s * (hi - lo)

            helper = ParametricPatch(
                "region", (u0, u1, 0.0, 1.0), lambda u, s: self.patch(*uv(u, s)), periodic=(True, False)
            )
            m = triangulate(helper, n_outer, n_radial, wrap_u=True, wrap_v=False)
            U, V = uv(m.params[:, 0], m.params[:, 1])
        else:
            raise RefinementError(f"no mesh for a {self.mode} region")
        return TriangleMesh(m.vertices, m.triangles, np.column_stack([U, V]), f"{self.patch.name}-ball")


def ball_region(patch: ParametricPatch, p, r: float, center=None) -> BallRegion:
    """Describe ``Sigma n B(p, r)``; ``center`` are parameters of ``p`` when known."""
    p = np.asarray(p, float)
    if r <= 0:
        raise ValueError("radius must be positive")
    if np.isinf(r):
        return BallRegion(patch, p, r, "whole")
    if center is None:
        center, dist = locate(patch, p)
    else:
        center = np.asarray(center, float)
        dist = float(np.linalg.norm(patch(center[0], center[1]) - p))
    scale = max(1.0, float(np.linalg.norm(p)))
    if dist <= ON_SURFACE_TOL * scale:
        return BallRegion(patch, p, r, "polar", center)
    if dist >= r:
        return BallRegion(patch, p, r, "empty", center)
    if not patch.periodic[0]:
        raise RefinementError("off-surface ball centers need a u-periodic patch")
    return BallRegion(patch, p, r, "band", center)


def region_area(patch: ParametricPatch, p, r: float, center=None) -> float:
    return ball_region(patch, p, r, center).integrate()
