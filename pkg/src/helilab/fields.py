"""Analytic field catalog, grid sampling, and stencil calculus.

Every analytic field evaluates vectorized: (n,3) points -> (n,3) vectors.
Sampled fields store values only at masked-in cells of one grid; stencil
curl and divergence are trusted at interior depth >= 2 and returned
zero-filled elsewhere so integrals restrict automatically.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import spherical_jn

from .errors import GridMismatchError
from .geometry import AxisymTorus, Ball, Circle, Frame, MaskedGrid

__all__ = [
    "AnalyticField",
    "TubeField",
    "HarmonicTorusField",
    "SpheromakField",
    "GradientField",
    "LinearCombination",
    "SampledField",
    "DensityField",
    "make_tube_field",
    "make_harmonic_torus_field",
    "make_spheromak",
    "sample",
    "curl",
    "divergence",
    "l2_inner",
    "field_energy",
]

_BESSEL_ROOT_BRACKET = (3.0, 2.0 * np.pi)


class AnalyticField:
    """Base class: a vector field given by a pointwise rule."""

    domain = None

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, pts) -> np.ndarray:
        a = np.asarray(pts, dtype=float)
        if a.ndim == 1:
            return self.evaluate(a.reshape(1, 3))[0]
        return self.evaluate(a)


def _bump(s: np.ndarray) -> np.ndarray:
    """exp(-1/(1-s^2)) for s < 1, else 0."""
    out = np.zeros_like(s)
    inside = s < 1.0
    si = s[inside]
    out[inside] = np.exp(-1.0 / (1.0 - si * si))
    return out


class TubeField(AnalyticField):
    """Smooth solenoidal tube around an oriented circle.

    Direction is azimuthal about the circle's axis; the magnitude profile is
    the standard bump in the meridian distance r from the core, scaled so the
    flux through a meridian half-plane section equals `flux`.
    """

    def __init__(self, circle: Circle, tube_radius: float, flux: float):
        if not 0.0 < tube_radius < circle.radius:
            raise ValueError("need 0 < tube_radius < circle radius")
        self.circle = circle
        self.tube_radius = float(tube_radius)
        self.flux = float(flux)
        # meridian flux of the unit profile: 2*pi*eps^2 * int_0^1 p(s) s ds,
        # with the 1-D integral fixed by a 200-point midpoint rule
        n = 200
        s = (np.arange(n) + 0.5) / n
        self._norm = 2.0 * np.pi * tube_radius**2 * float(np.sum(_bump(s) * s) / n)
        self.domain = AxisymTorus(circle.frame, circle.radius, tube_radius)

    @property
    def support(self) -> AxisymTorus:
        return self.domain

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        q = self.circle.frame.to_local(pts)
        rho = np.hypot(q[:, 0], q[:, 1])
        r = np.hypot(rho - self.circle.radius, q[:, 2])
        mag = self.flux * _bump(r / self.tube_radius) / self._norm
        safe = np.where(rho > 0.0, rho, 1.0)
        phihat = np.column_stack([-q[:, 1] / safe, q[:, 0] / safe, np.zeros(len(q))])
        phihat[rho == 0.0] = 0.0
        return self.circle.frame.vec_to_world(mag[:, None] * phihat)


class HarmonicTorusField(AnalyticField):
    """The harmonic knot field of a solid torus: phi_hat / (2 pi rho) inside, 0 outside.

    Curl- and divergence-free in the open torus, tangent to the boundary,
    unit circulation around the core loop.
    """

    def __init__(self, torus: AxisymTorus):
        self.torus = torus
        self.domain = torus

    @property
    def section_flux(self) -> float:
        """Flux through a meridian section: R - sqrt(R^2 - a^2)."""
        R, a = self.torus.major_radius, self.torus.minor_radius
        return R - np.sqrt(R * R - a * a)

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        q = self.torus.frame.to_local(pts)
        rho = np.hypot(q[:, 0], q[:, 1])
        a2 = self.torus.minor_radius**2
        inside = (rho - self.torus.major_radius) ** 2 + q[:, 2] ** 2 <= a2 * (1.0 + 1e-12)
        safe = np.where(rho > 0.0, rho, 1.0)
        mag = np.where(inside & (rho > 0.0), 1.0 / (2.0 * np.pi * safe), 0.0)
        phihat = np.column_stack([-q[:, 1] / safe, q[:, 0] / safe, np.zeros(len(q))])
        return self.torus.frame.vec_to_world(mag[:, None] * phihat)


class SpheromakField(AnalyticField):
    """Axisymmetric curl eigenfield of a ball: curl F = xi * F, F tangent to the sphere.

    Components in spherical coordinates about the ball axis, with x = xi*r:
        F_r     = 2 B0 cos(theta) j1(x)/x
        F_theta =  -B0 sin(theta) (j1(x)/x + j1'(x))
        F_phi   =   B0 sin(theta) j1(x)
    xi * radius is the first positive root of j1, so F_r vanishes at the boundary.
    """

    def __init__(self, ball: Ball, amplitude: float = 1.0, axes: np.ndarray | None = None):
        self.ball = ball
        self.amplitude = float(amplitude)
        self.frame = Frame(ball.center, np.eye(3) if axes is None else axes)
        root = brentq(
            lambda x: spherical_jn(1, x), *_BESSEL_ROOT_BRACKET, xtol=1e-14
        )
        self.xi = root / ball.radius
        self.domain = ball

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        u = self.frame.to_local(pts)
        r = np.linalg.norm(u, axis=1)
        x = self.xi * r
        j1 = spherical_jn(1, x)
        j1p = spherical_jn(1, x, derivative=True)
        # j1(x)/x -> 1/3 as x -> 0
        small = x < 1e-8
        j1_over_x = np.where(small, 1.0 / 3.0, j1 / np.where(small, 1.0, x))

        rho = np.hypot(u[:, 0], u[:, 1])
        r_safe = np.where(r > 0.0, r, 1.0)
        rho_safe = np.where(rho > 0.0, rho, 1.0)
        cos_t = np.where(r > 0.0, u[:, 2] / r_safe, 1.0)
        sin_t = np.where(r > 0.0, rho / r_safe, 0.0)
        rhat = u / r_safe[:, None]
        rhat[r == 0.0] = [0.0, 0.0, 1.0]
        phihat = np.column_stack([-u[:, 1] / rho_safe, u[:, 0] / rho_safe, np.zeros(len(u))])
        phihat[rho == 0.0] = 0.0
        that = np.cross(phihat, rhat)
        # on the axis sin(theta)=0 kills the ill-defined theta/phi directions
        fr = 2.0 * self.amplitude * cos_t * j1_over_x
        ft = -self.amplitude * sin_t * (j1_over_x + j1p)
        fp = self.amplitude * sin_t * j1
        local = fr[:, None] * rhat + ft[:, None] * that + fp[:, None] * phihat
        return self.frame.vec_to_world(local)


class GradientField(AnalyticField):
    """Gradient of the scalar a.(p-c) + (p-c).Q(p-c); exactly curl-free."""

    def __init__(self, linear=(0.0, 0.0, 0.0), quad=None, center=(0.0, 0.0, 0.0)):
        self.linear = np.asarray(linear, dtype=float).reshape(3)
        q = np.zeros((3, 3)) if quad is None else np.asarray(quad, dtype=float)
        self.quad = 0.5 * (q + q.T)
        self.center = np.asarray(center, dtype=float).reshape(3)
        if not (np.all(np.isfinite(self.linear)) and np.all(np.isfinite(self.quad))):
            raise ValueError("coefficients must be finite")

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        d = pts - self.center
        return self.linear + 2.0 * d @ self.quad.T


class LinearCombination(AnalyticField):
    """Finite linear combination of fields (or any point-rule callables)."""

    def __init__(self, terms):
        self.terms = [(float(c), f) for c, f in terms]
        if not all(np.isfinite(c) for c, _ in self.terms):
            raise ValueError("coefficients must be finite")

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        out = np.zeros((len(pts), 3))
        for c, f in self.terms:
            out += c * np.asarray(f(pts), dtype=float)
        return out


class DensityField:
    """Positive scalar rule; uniform by default."""

    def __init__(self, rule=None, value: float = 1.0):
        self._rule = rule
        self._value = float(value)
        if rule is None and self._value <= 0.0:
            raise ValueError("density must be positive")

    def __call__(self, pts) -> np.ndarray:
        a = np.asarray(pts, dtype=float)
        squeeze = a.ndim == 1
        a = a.reshape(-1, 3)
        out = (
            np.full(len(a), self._value)
            if self._rule is None
            else np.asarray(self._rule(a), dtype=float).reshape(len(a))
        )
        return out[0] if squeeze else out


def make_tube_field(circle: Circle, tube_radius: float, flux: float) -> TubeField:
    return TubeField(circle, tube_radius, flux)


def make_harmonic_torus_field(torus: AxisymTorus) -> HarmonicTorusField:
    return HarmonicTorusField(torus)


def make_spheromak(
    ball: Ball, amplitude: float = 1.0, axes: np.ndarray | None = None
) -> tuple[SpheromakField, float]:
    f = SpheromakField(ball, amplitude, axes)
    return f, f.xi


@dataclass
class SampledField:
    """Vector values at the masked-in cells of one grid, in the grid's cell order."""

    grid: MaskedGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_cells, 3):
            raise ValueError("values must be (n_masked, 3)")
        self.values = v


def sample(field, grid: MaskedGrid) -> SampledField:
    """Evaluate an analytic field (or rule) at the grid's masked cell centers."""
    return SampledField(grid, np.asarray(field(grid.centers), dtype=float))


def _axis_gradient(dense: np.ndarray, axis: int, h: float) -> np.ndarray:
    out = np.zeros_like(dense)
    sl_m = [slice(None)] * 3
    sl_p = [slice(None)] * 3
    sl_c = [slice(None)] * 3
    sl_m[axis] = slice(0, -2)
    sl_p[axis] = slice(2, None)
    sl_c[axis] = slice(1, -1)
    out[tuple(sl_c)] = (dense[tuple(sl_p)] - dense[tuple(sl_m)]) / (2.0 * h)
    return out


def curl(f: SampledField, min_depth: int = 2) -> SampledField:
    """Central second-order stencil curl; zero-filled below the given interior depth."""
    g = f.grid
    dense = g.scatter(f.values)
    dx = _axis_gradient(dense, 0, g.h)
    dy = _axis_gradient(dense, 1, g.h)
    dz = _axis_gradient(dense, 2, g.h)
    c = np.stack(
        [
            dy[..., 2] - dz[..., 1],
            dz[..., 0] - dx[..., 2],
            dx[..., 1] - dy[..., 0],
        ],
        axis=-1,
    )
    vals = c[g.mask]
    vals[~g.depth_mask(min_depth)] = 0.0
    return SampledField(g, vals)


def divergence(f: SampledField, min_depth: int = 2) -> np.ndarray:
    """Central second-order stencil divergence; zero-filled below the given depth."""
    g = f.grid
    dense = g.scatter(f.values)
    d = (
        _axis_gradient(dense[..., 0], 0, g.h)
        + _axis_gradient(dense[..., 1], 1, g.h)
        + _axis_gradient(dense[..., 2], 2, g.h)
    )
    vals = d[g.mask]
    vals[~g.depth_mask(min_depth)] = 0.0
    return vals


def l2_inner(f: SampledField, g: SampledField) -> float:
    """Midpoint-rule L2 inner product; both fields must share one grid."""
    if not f.grid.same_grid(g.grid):
        raise GridMismatchError("sampled fields live on different grids")
    return float(np.sum(np.einsum("ij,ij->i", f.values, g.values)) * f.grid.cell_volume)


def field_energy(f: SampledField) -> float:
    return l2_inner(f, f)
