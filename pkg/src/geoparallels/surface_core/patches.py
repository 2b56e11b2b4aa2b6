"""Parametric surface patches, fundamental forms and the minimal surface equation.

Sign conventions
----------------
The unit normal is ``X_u x X_v / |X_u x X_v|``.  Second-form coefficients are
taken as ``e = -<X_uu, nu>`` (and likewise ``f``, ``g``) so that a sphere whose
parameterization produces the outward normal has ``H = (k1 + k2) / 2 = +1/R``.
With this choice the flow ``dX/dt = -H nu`` shrinks spheres.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "DegenerateImmersionError",
    "ParametricPatch",
    "FundamentalForms",
    "GraphFunction",
    "evaluate_forms",
    "msq_residual",
    "plane",
    "disk",
    "sphere",
    "catenoid",
    "enneper",
    "bour",
    "helicoid",
    "torus",
    "scherk_graph",
    "graph_patch",
    "paraboloid_graph",
    "PATCHES",
    "get_patch",
]

DET_FLOOR = 1e-24


class DegenerateImmersionError(ValueError):
    """Raised when the first fundamental form is singular at a sample."""


def _stack(*cols):
    return np.stack(np.broadcast_arrays(*cols), axis=-1)


@dataclass(frozen=True)
class ParametricPatch:
    """A smooth map from the rectangle ``[u0,u1] x [v0,v1]`` into R^3.

    ``position(u, v)`` must broadcast over array arguments and return an array
    with a trailing axis of length 3.  ``d1`` returns ``(X_u, X_v)`` and ``d2``
    returns ``(X_uu, X_uv, X_vv)``; when either is missing, central differences
    are used instead.
    """

    name: str
    domain: tuple[float, float, float, float]
    position: Callable[[np.ndarray, np.ndarray], np.ndarray]
    d1: Callable | None = None
    d2: Callable | None = None
    periodic: tuple[bool, bool] = (False, False)
    minimal: bool = False
    fd_step: float = 1e-5
    # second differences lose half the digits; use the cube-root-ish optimum
    fd_step2: float = 1e-4
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def spans(self) -> tuple[float, float]:
        u0, u1, v0, v1 = self.domain
        return u1 - u0, v1 - v0

    def __call__(self, u, v):
        return self.position(np.asarray(u, float), np.asarray(v, float))

    def first_derivatives(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        if self.d1 is not None:
            return self.d1(u, v)
        hu, hv = (self.fd_step * s for s in self.spans)
        xu = (self.position(u + hu, v) - self.position(u - hu, v)) / (2 * hu)
        xv = (self.position(u, v + hv) - self.position(u, v - hv)) / (2 * hv)
        return xu, xv

    def second_derivatives(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        if self.d2 is not None:
            return self.d2(u, v)
        hu, hv = (self.fd_step2 * s for s in self.spans)
        P = self.position
        x0 = P(u, v)
        xuu = (P(u + hu, v) - 2 * x0 + P(u - hu, v)) / hu**2
        xvv = (P(u, v + hv) - 2 * x0 + P(u, v - hv)) / hv**2
        xuv = (
            P(u + hu, v + hv) - P(u + hu, v - hv) - P(u - hu, v + hv) + P(u - hu, v - hv)
        ) / (4 * hu * hv)
        return xuu, xuv, xvv

    def area_element(self, u, v):
        xu, xv = self.first_derivatives(u, v)
        return np.linalg.norm(np.cross(xu, xv), axis=-1)

    def contains(self, u, v) -> np.ndarray:
        u0, u1, v0, v1 = self.domain
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        ok_u = np.ones_like(u, bool) if self.periodic[0] else (u >= u0) & (u <= u1)
        ok_v = np.ones_like(v, bool) if self.periodic[1] else (v >= v0) & (v <= v1)
        return ok_u & ok_v

    def restricted(self, domain, name: str | None = None) -> "ParametricPatch":
        """Same map on a smaller (non-periodic) parameter rectangle."""
        return ParametricPatch(
            name=name or self.name,
            domain=tuple(float(d) for d in domain),
            position=self.position,
            d1=self.d1,
            d2=self.d2,
            periodic=(False, False),
            minimal=self.minimal,
            fd_step=self.fd_step,
            fd_step2=self.fd_step2,
            meta=dict(self.meta),
        )


@dataclass(frozen=True)
class FundamentalForms:
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    e: np.ndarray
    f: np.ndarray
    g: np.ndarray
    normal: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    H: np.ndarray
    K: np.ndarray
    a2: np.ndarray


def evaluate_forms(patch: ParametricPatch, u, v) -> FundamentalForms:
    """First and second fundamental forms and curvatures at ``(u, v)``.

    Works elementwise on array inputs.  Raises DegenerateImmersionError when
    ``EG - F^2`` falls below the floor at any sample.
    """
    xu, xv = patch.first_derivatives(u, v)
    xuu, xuv, xvv = patch.second_derivatives(u, v)
    E = np.einsum("...i,...i->...", xu, xu)
    F = np.einsum("...i,...i->...", xu, xv)
    G = np.einsum("...i,...i->...", xv, xv)
    det = E * G - F * F
    if np.any(~(det > DET_FLOOR)):
        raise DegenerateImmersionError(
            f"{patch.name}: singular first fundamental form (min EG-F^2 = {np.min(det):.3e})"
        )
    n = np.cross(xu, xv)
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    e = -np.einsum("...i,...i->...", xuu, n)
    f = -np.einsum("...i,...i->...", xuv, n)
    g = -np.einsum("...i,...i->...", xvv, n)
    H0 = (e * G - 2 * f * F + g * E) / (2 * det)
    K0 = (e * g - f * f) / det
    disc = np.sqrt(np.maximum(H0 * H0 - K0, 0.0))
    k1 = H0 + disc
    k2 = H0 - disc
    # recompute from k1, k2 so H^2 >= K and a2 = 4H^2 - 2K hold to rounding
    H = 0.5 * (k1 + k2)
    K = k1 * k2
    a2 = k1 * k1 + k2 * k2
    return FundamentalForms(E, F, G, e, f, g, n, k1, k2, H, K, a2)


@dataclass(frozen=True)
class GraphFunction:
    """A height function ``u(x, y)`` with its first and second partials."""

    name: str
    f: Callable
    fx: Callable
    fy: Callable
    fxx: Callable
    fxy: Callable
    fyy: Callable
    domain: tuple[float, float, float, float]
    minimal: bool = False


def msq_residual(u_fn: GraphFunction, x, y):
    """Left-hand side of the minimal surface equation for a graph."""
    ux, uy = u_fn.fx(x, y), u_fn.fy(x, y)
    uxx, uxy, uyy = u_fn.fxx(x, y), u_fn.fxy(x, y), u_fn.fyy(x, y)
    return (1 + ux**2) * uyy - 2 * ux * uy * uxy + (1 + uy**2) * uxx


def graph_patch(gf: GraphFunction) -> ParametricPatch:
    zero = lambda x: np.zeros_like(x)
    one = lambda x: np.ones_like(x)

    def pos(x, y):
        return _stack(x, y, gf.f(x, y))

    def d1(x, y):
        return _stack(one(x), zero(x), gf.fx(x, y)), _stack(zero(x), one(x), gf.fy(x, y))

    def d2(x, y):
        z = zero(x + y)
        return _stack(z, z, gf.fxx(x, y)), _stack(z, z, gf.fxy(x, y)), _stack(z, z, gf.fyy(x, y))

    return ParametricPatch(f"graph:{gf.name}", gf.domain, pos, d1, d2, minimal=gf.minimal)


# ---------------------------------------------------------------- catalog


def plane(extent: float = 2.0) -> ParametricPatch:
    def pos(u, v):
        return _stack(u, v, 0.0 * u)

    def d1(u, v):
        z = 0.0 * (u + v)
        return _stack(z + 1, z, z), _stack(z, z + 1, z)

    def d2(u, v):
        z = np.zeros(np.broadcast(u, v).shape + (3,))
        return z, z.copy(), z.copy()

    return ParametricPatch("plane", (-extent, extent, -extent, extent), pos, d1, d2, minimal=True)


def disk(radius: float = 1.0) -> ParametricPatch:
    """Flat disk in polar parameters (r, theta); theta is periodic."""

    def pos(r, t):
        return _stack(r * np.cos(t), r * np.sin(t), 0.0 * r)

    def d1(r, t):
        z = 0.0 * (r + t)
        return _stack(np.cos(t) + z, np.sin(t) + z, z), _stack(-r * np.sin(t), r * np.cos(t), z)

    def d2(r, t):
        z = 0.0 * (r + t)
        return (
            _stack(z, z, z),
            _stack(-np.sin(t) + z, np.cos(t) + z, z),
            _stack(-r * np.cos(t), -r * np.sin(t), z),
        )

    return ParametricPatch(
        "disk", (0.0, radius, 0.0, 2 * np.pi), pos, d1, d2, periodic=(False, True), minimal=True
    )


def sphere(radius: float = 1.0) -> ParametricPatch:
    """Round sphere; u is the polar angle, v the (periodic) azimuth."""
    R = radius

    def pos(u, v):
        return R * _stack(np.sin(u) * np.cos(v), np.sin(u) * np.sin(v), np.cos(u) + 0 * v)

    def d1(u, v):
        xu = R * _stack(np.cos(u) * np.cos(v), np.cos(u) * np.sin(v), -np.sin(u) + 0 * v)
        xv = R * _stack(-np.sin(u) * np.sin(v), np.sin(u) * np.cos(v), 0 * (u + v))
        return xu, xv

    def d2(u, v):
        xuu = -pos(u, v)
        xuv = R * _stack(-np.cos(u) * np.sin(v), np.cos(u) * np.cos(v), 0 * (u + v))
        xvv = R * _stack(-np.sin(u) * np.cos(v), -np.sin(u) * np.sin(v), 0 * (u + v))
        return xuu, xuv, xvv

    return ParametricPatch(
        "sphere", (0.0, np.pi, 0.0, 2 * np.pi), pos, d1, d2, periodic=(False, True),
        meta={"radius": R},
    )


def catenoid(height: float = 1.0) -> ParametricPatch:
    """``(cosh v cos u, cosh v sin u, v)`` with ``|v| <= height``; u periodic."""

    def pos(u, v):
        c = np.cosh(v)
        return _stack(c * np.cos(u), c * np.sin(u), v + 0 * u)

    def d1(u, v):
        c, s = np.cosh(v), np.sinh(v)
        return (
            _stack(-c * np.sin(u), c * np.cos(u), 0 * (u + v)),
            _stack(s * np.cos(u), s * np.sin(u), 1 + 0 * (u + v)),
        )

    def d2(u, v):
        c, s = np.cosh(v), np.sinh(v)
        return (
            _stack(-c * np.cos(u), -c * np.sin(u), 0 * (u + v)),
            _stack(-s * np.sin(u), s * np.cos(u), 0 * (u + v)),
            _stack(c * np.cos(u), c * np.sin(u), 0 * (u + v)),
        )

    return ParametricPatch(
        "catenoid", (0.0, 2 * np.pi, -height, height), pos, d1, d2,
        periodic=(True, False), minimal=True, meta={"height": height},
    )


def enneper(extent: float = 1.0) -> ParametricPatch:
    def pos(u, v):
        return _stack(u - u**3 / 3 + u * v**2, v - v**3 / 3 + v * u**2, u**2 - v**2)

    def d1(u, v):
        return (
            _stack(1 - u**2 + v**2, 2 * u * v, 2 * u),
            _stack(2 * u * v, 1 - v**2 + u**2, -2 * v),
        )

    def d2(u, v):
        z = 0 * (u + v)
        return (
            _stack(-2 * u + z, 2 * v + z, 2 + z),
            _stack(2 * v + z, 2 * u + z, z),
            _stack(2 * u + z, -2 * v + z, -2 + z),
        )

    return ParametricPatch("enneper", (-extent, extent, -extent, extent), pos, d1, d2, minimal=True)


def bour(rmax: float = 1.0, rmin: float = 0.05) -> ParametricPatch:
    """Bour's minimal surface in polar parameters (r, theta)."""

    def pos(r, t):
        return _stack(
            r * np.cos(t) - r**2 / 2 * np.cos(2 * t),
            -r * np.sin(t) - r**2 / 2 * np.sin(2 * t),
            4.0 / 3.0 * r**1.5 * np.cos(1.5 * t),
        )

    def d1(r, t):
        xr = _stack(
            np.cos(t) - r * np.cos(2 * t),
            -np.sin(t) - r * np.sin(2 * t),
            2 * r**0.5 * np.cos(1.5 * t),
        )
        xt = _stack(
            -r * np.sin(t) + r**2 * np.sin(2 * t),
            -r * np.cos(t) - r**2 * np.cos(2 * t),
            -2 * r**1.5 * np.sin(1.5 * t),
        )
        return xr, xt

    def d2(r, t):
        z = 0 * (r + t)
        xrr = _stack(-np.cos(2 * t) + z, -np.sin(2 * t) + z, r**-0.5 * np.cos(1.5 * t))
        xrt = _stack(
            -np.sin(t) + 2 * r * np.sin(2 * t),
            -np.cos(t) - 2 * r * np.cos(2 * t),
            -3 * r**0.5 * np.sin(1.5 * t),
        )
        xtt = _stack(
            -r * np.cos(t) + 2 * r**2 * np.cos(2 * t),
            r * np.sin(t) + 2 * r**2 * np.sin(2 * t),
            -3 * r**1.5 * np.cos(1.5 * t),
        )
        return xrr, xrt, xtt

    return ParametricPatch("bour", (rmin, rmax, 0.0, 2 * np.pi), pos, d1, d2, minimal=True)


def helicoid(extent: float = 1.0) -> ParametricPatch:
    def pos(u, v):
        return _stack(u * np.cos(v), u * np.sin(v), v + 0 * u)

    def d1(u, v):
        z = 0 * (u + v)
        return _stack(np.cos(v) + z, np.sin(v) + z, z), _stack(-u * np.sin(v), u * np.cos(v), 1 + z)

    def d2(u, v):
        z = 0 * (u + v)
        return _stack(z, z, z), _stack(-np.sin(v) + z, np.cos(v) + z, z), _stack(-u * np.cos(v), -u * np.sin(v), z)

    return ParametricPatch("helicoid", (-extent, extent, -np.pi, np.pi), pos, d1, d2, minimal=True)


def torus(R: float = 2.0, r: float = 0.75) -> ParametricPatch:
    def pos(u, v):
        rho = R + r * np.cos(v)
        return _stack(rho * np.cos(u), rho * np.sin(u), r * np.sin(v) + 0 * u)

    return ParametricPatch(
        "torus", (0.0, 2 * np.pi, 0.0, 2 * np.pi), pos, periodic=(True, True),
        meta={"R": R, "r": r},
    )


def scherk_graph(extent: float = 1.0) -> GraphFunction:
    """Scherk's first surface ``ln cos x - ln cos y`` on ``|x|, |y| < extent < pi/2``."""
    return GraphFunction(
        name="scherk",
        f=lambda x, y: np.log(np.cos(x)) - np.log(np.cos(y)),
        fx=lambda x, y: -np.tan(x) + 0 * y,
        fy=lambda x, y: np.tan(y) + 0 * x,
        fxx=lambda x, y: -1 / np.cos(x) ** 2 + 0 * y,
        fxy=lambda x, y: 0 * (x + y),
        fyy=lambda x, y: 1 / np.cos(y) ** 2 + 0 * x,
        domain=(-extent, extent, -extent, extent),
        minimal=True,
    )


def paraboloid_graph(extent: float = 1.0) -> GraphFunction:
    """``u = x^2``: the non-minimal control for the minimal surface equation."""
    return GraphFunction(
        name="x_squared",
        f=lambda x, y: x**2 + 0 * y,
        fx=lambda x, y: 2 * x + 0 * y,
        fy=lambda x, y: 0 * (x + y),
        fxx=lambda x, y: 2 + 0 * (x + y),
        fxy=lambda x, y: 0 * (x + y),
        fyy=lambda x, y: 0 * (x + y),
        domain=(-extent, extent, -extent, extent),
    )


PATCHES: dict[str, Callable[..., ParametricPatch]] = {
    "plane": plane,
    "disk": disk,
    "sphere": sphere,
    "catenoid": catenoid,
    "enneper": enneper,
    "bour": bour,
    "helicoid": helicoid,
    "torus": torus,
    "scherk": lambda extent=1.0: graph_patch(scherk_graph(extent)),
}


def get_patch(name: str, **params) -> ParametricPatch:
    try:
        factory = PATCHES[name]
    except KeyError:
        raise KeyError(f"unknown patch {name!r}; known: {sorted(PATCHES)}") from None
    return factory(**params)
