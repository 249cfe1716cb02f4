"""Domains, masked grids, boundary samples, and curves.

All quadrature in the package runs over three kinds of objects built here:
masked Cartesian grids (midpoint rule, cell volume h^3), parameter-grid
surface patches with analytic area elements, and closed polylines.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DegenerateGridError, OpenCurveError, OverlapError

__all__ = [
    "Frame",
    "Circle",
    "Ball",
    "AxisymTorus",
    "UnionDomain",
    "MaskedGrid",
    "SurfacePatchSet",
    "PolylineCurve",
    "CrossSection",
    "contains",
    "build_grid",
    "boundary_samples",
    "core_loop",
    "cross_section",
]


def _as_points(pts) -> tuple[np.ndarray, bool]:
    """Return (n,3) float array and whether the input was a single point."""
    a = np.asarray(pts, dtype=float)
    if a.ndim == 1:
        return a.reshape(1, 3), True
    return a, False


@dataclass(frozen=True)
class Frame:
    """Rigid pose: origin plus right-handed orthonormal axes (rows e1, e2, e3)."""

    origin: np.ndarray
    axes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float).reshape(3))
        axes = np.asarray(self.axes, dtype=float).reshape(3, 3)
        object.__setattr__(self, "axes", axes)
        if not np.allclose(axes @ axes.T, np.eye(3), atol=1e-10):
            raise ValueError("frame axes must be orthonormal")
        if np.linalg.det(axes) < 0.0:
            raise ValueError("frame axes must be right-handed")

    @staticmethod
    def standard(origin=(0.0, 0.0, 0.0)) -> "Frame":
        return Frame(np.asarray(origin, dtype=float), np.eye(3))

    @staticmethod
    def from_axis(origin, axis, ref=None) -> "Frame":
        """Frame with e3 along `axis`; e1 from `ref` (or the least-aligned coordinate axis)."""
        e3 = np.asarray(axis, dtype=float)
        n = np.linalg.norm(e3)
        if n == 0.0:
            raise ValueError("zero axis")
        e3 = e3 / n
        if ref is None:
            ref = np.eye(3)[np.argmin(np.abs(e3))]
        e1 = np.asarray(ref, dtype=float) - np.dot(ref, e3) * e3
        n1 = np.linalg.norm(e1)
        if n1 < 1e-12:
            raise ValueError("reference direction parallel to axis")
        e1 = e1 / n1
        e2 = np.cross(e3, e1)
        return Frame(np.asarray(origin, dtype=float), np.vstack([e1, e2, e3]))

    def to_local(self, pts: np.ndarray) -> np.ndarray:
        return (np.asarray(pts, dtype=float) - self.origin) @ self.axes.T

    def to_world(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(pts, dtype=float) @ self.axes + self.origin

    def vec_to_world(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v, dtype=float) @ self.axes

    def vec_to_local(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v, dtype=float) @ self.axes.T


@dataclass(frozen=True)
class Circle:
    """Oriented circle of radius `radius` in the e1-e2 plane of `frame`."""

    frame: Frame
    radius: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("circle radius must be positive")

    def polyline(self, n_seg: int) -> "PolylineCurve":
        if n_seg < 16:
            raise ValueError("need at least 16 segments")
        ang = 2.0 * np.pi * np.arange(n_seg) / n_seg
        local = self.radius * np.column_stack([np.cos(ang), np.sin(ang), np.zeros(n_seg)])
        return PolylineCurve(self.frame.to_world(local), closed=True)


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(3))
        if self.radius <= 0.0:
            raise ValueError("ball radius must be positive")

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        r = self.radius
        return self.center - r, self.center + r

    def bounding_sphere(self) -> tuple[np.ndarray, float]:
        return self.center, self.radius


@dataclass(frozen=True)
class AxisymTorus:
    """Solid torus of revolution: major radius R about frame e3, minor radius a < R."""

    frame: Frame
    major_radius: float
    minor_radius: float

    def __post_init__(self):
        if not 0.0 < self.minor_radius < self.major_radius:
            raise ValueError("need 0 < minor_radius < major_radius")

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        r = self.major_radius + self.minor_radius
        c = self.frame.origin
        return c - r, c + r

    def bounding_sphere(self) -> tuple[np.ndarray, float]:
        return self.frame.origin, self.major_radius + self.minor_radius

    def core_circle(self) -> Circle:
        return Circle(self.frame, self.major_radius)


@dataclass(frozen=True)
class UnionDomain:
    """Disjoint union of balls and tori; disjointness enforced conservatively."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        if len(parts) < 1:
            raise ValueError("union needs at least one part")
        for i in range(len(parts)):
            ci, ri = parts[i].bounding_sphere()
            for j in range(i + 1, len(parts)):
                cj, rj = parts[j].bounding_sphere()
                if np.linalg.norm(ci - cj) <= ri + rj:
                    raise OverlapError(
                        f"parts {i} and {j} have intersecting bounding spheres"
                    )

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        boxes = [p.bounding_box() for p in self.parts]
        lo = np.min([b[0] for b in boxes], axis=0)
        hi = np.max([b[1] for b in boxes], axis=0)
        return lo, hi


def contains(domain, pts) -> np.ndarray:
    """Closed-set membership test; returns a bool per point."""
    p, single = _as_points(pts)
    if isinstance(domain, Ball):
        out = np.linalg.norm(p - domain.center, axis=1) <= domain.radius
    elif isinstance(domain, AxisymTorus):
        q = domain.frame.to_local(p)
        rho = np.hypot(q[:, 0], q[:, 1])
        out = (rho - domain.major_radius) ** 2 + q[:, 2] ** 2 <= domain.minor_radius**2
    elif isinstance(domain, UnionDomain):
        out = np.zeros(len(p), dtype=bool)
        for part in domain.parts:
            out |= contains(part, p)
    else:
        raise TypeError(f"unsupported domain {type(domain).__name__}")
    return out[0] if single else out


class MaskedGrid:
    """Cartesian cell-center grid restricted to a domain.

    origin is the center of cell (0,0,0); cells are cubes of side h.
    `depth` holds, per cell, the number of grid-step erosions the mask
    survives: a cell has depth >= k exactly when every cell within
    Chebyshev distance k lies inside the mask.  Central second-order
    stencils are trusted at depth >= 2 only.
    """

    def __init__(self, domain, h: float, origin, dims, mask: np.ndarray):
        self.domain = domain
        self.h = float(h)
        self.origin = np.asarray(origin, dtype=float).reshape(3)
        self.dims = tuple(int(d) for d in dims)
        self.mask = mask
        if not mask.any():
            raise DegenerateGridError("no cell centers fall inside the domain")
        padded = np.pad(mask, 1, constant_values=False)
        cdt = ndimage.distance_transform_cdt(padded, metric="chessboard")
        depth = cdt[1:-1, 1:-1, 1:-1].astype(np.int16) - 1
        depth[~mask] = -1
        self.depth = depth
        idx = np.argwhere(mask)  # fixed C-order cell ordering
        self.indices = idx
        self.centers = self.origin + idx * self.h
        self.cell_depth = depth[mask]
        flat = np.full(self.dims, -1, dtype=np.int64)
        flat[mask] = np.arange(idx.shape[0])
        self.flat_index = flat

    @property
    def n_cells(self) -> int:
        return self.indices.shape[0]

    @property
    def cell_volume(self) -> float:
        return self.h**3

    def depth_mask(self, min_depth: int) -> np.ndarray:
        """Boolean over masked cells: depth >= min_depth."""
        return self.cell_depth >= min_depth

    def same_grid(self, other: "MaskedGrid") -> bool:
        return (
            self is other
            or (
                self.h == other.h
                and self.dims == other.dims
                and np.array_equal(self.origin, other.origin)
                and np.array_equal(self.mask, other.mask)
            )
        )

    def scatter(self, values: np.ndarray) -> np.ndarray:
        """Dense (nx,ny,nz,...) array with `values` at masked cells, zero elsewhere."""
        out = np.zeros(self.dims + values.shape[1:], dtype=float)
        out[self.mask] = values
        return out


def build_grid(domain, h: float, padding: int = 2) -> MaskedGrid:
    """Masked grid over the domain's bounding box with `padding` rings of margin."""
    if h <= 0.0:
        raise ValueError("spacing must be positive")
    lo, hi = domain.bounding_box()
    origin = lo - padding * h + 0.5 * h
    dims = np.ceil((hi + padding * h - origin) / h).astype(int) + 1
    if np.any(dims < 1):
        raise DegenerateGridError("empty bounding box")
    ii = [origin[k] + h * np.arange(dims[k]) for k in range(3)]
    xs, ys, zs = np.meshgrid(*ii, indexing="ij")
    centers = np.column_stack([xs.ravel(), ys.ravel(), zs.ravel()])
    mask = contains(domain, centers).reshape(tuple(dims))
    return MaskedGrid(domain, h, origin, dims, mask)


@dataclass
class SurfacePatchSet:
    """Quadrature samples of a closed surface: points, unit outward normals, areas."""

    points: np.ndarray
    normals: np.ndarray
    areas: np.ndarray

    @property
    def total_area(self) -> float:
        return float(np.sum(self.areas))

    @staticmethod
    def concatenate(parts: list["SurfacePatchSet"]) -> "SurfacePatchSet":
        return SurfacePatchSet(
            np.concatenate([p.points for p in parts]),
            np.concatenate([p.normals for p in parts]),
            np.concatenate([p.areas for p in parts]),
        )


def _sphere_samples(ball: Ball, n_u: int, n_v: int) -> SurfacePatchSet:
    th = (np.arange(n_u) + 0.5) * np.pi / n_u
    ph = (np.arange(n_v) + 0.5) * 2.0 * np.pi / n_v
    T, P = np.meshgrid(th, ph, indexing="ij")
    st, ct = np.sin(T).ravel(), np.cos(T).ravel()
    sp, cp = np.sin(P).ravel(), np.cos(P).ravel()
    n = np.column_stack([st * cp, st * sp, ct])
    pts = ball.center + ball.radius * n
    dA = ball.radius**2 * st * (np.pi / n_u) * (2.0 * np.pi / n_v)
    return SurfacePatchSet(pts, n, dA)


def _torus_samples(torus: AxisymTorus, n_u: int, n_v: int) -> SurfacePatchSet:
    R, a = torus.major_radius, torus.minor_radius
    th = (np.arange(n_u) + 0.5) * 2.0 * np.pi / n_u  # poloidal
    ph = (np.arange(n_v) + 0.5) * 2.0 * np.pi / n_v  # azimuthal
    T, P = np.meshgrid(th, ph, indexing="ij")
    st, ct = np.sin(T).ravel(), np.cos(T).ravel()
    sp, cp = np.sin(P).ravel(), np.cos(P).ravel()
    rad = np.column_stack([cp, sp, np.zeros_like(sp)])  # unit vector from axis, local
    locpts = (R + a * ct)[:, None] * rad
    locpts[:, 2] = a * st
    n_loc = ct[:, None] * rad
    n_loc[:, 2] = st
    dA = a * (R + a * ct) * (2.0 * np.pi / n_u) * (2.0 * np.pi / n_v)
    return SurfacePatchSet(
        torus.frame.to_world(locpts), torus.frame.vec_to_world(n_loc), dA
    )


def boundary_samples(domain, n_u: int = 64, n_v: int = 64) -> SurfacePatchSet:
    """Midpoint parameter-grid samples of the domain boundary with outward normals."""
    if isinstance(domain, Ball):
        return _sphere_samples(domain, n_u, n_v)
    if isinstance(domain, AxisymTorus):
        return _torus_samples(domain, n_u, n_v)
    if isinstance(domain, UnionDomain):
        return SurfacePatchSet.concatenate(
            [boundary_samples(p, n_u, n_v) for p in domain.parts]
        )
    raise TypeError(f"unsupported domain {type(domain).__name__}")


class PolylineCurve:
    """Closed or open polyline with distinct consecutive vertices."""

    def __init__(self, vertices: np.ndarray, closed: bool = True):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3 or v.shape[0] < 2:
            raise ValueError("vertices must be an (n,3) array, n >= 2")
        if closed and np.array_equal(v[0], v[-1]):
            raise ValueError("closed polyline must not repeat the first vertex")
        nxt = np.roll(v, -1, axis=0) if closed else v[1:]
        cur = v if closed else v[:-1]
        if np.any(np.linalg.norm(nxt - cur, axis=1) == 0.0):
            raise ValueError("consecutive vertices must be distinct")
        self.vertices = v
        self.closed = bool(closed)

    @property
    def n_segments(self) -> int:
        return self.vertices.shape[0] if self.closed else self.vertices.shape[0] - 1

    @property
    def edge_vectors(self) -> np.ndarray:
        if self.closed:
            return np.roll(self.vertices, -1, axis=0) - self.vertices
        return self.vertices[1:] - self.vertices[:-1]

    @property
    def midpoints(self) -> np.ndarray:
        if self.closed:
            return 0.5 * (self.vertices + np.roll(self.vertices, -1, axis=0))
        return 0.5 * (self.vertices[1:] + self.vertices[:-1])

    @property
    def length(self) -> float:
        return float(np.sum(np.linalg.norm(self.edge_vectors, axis=1)))

    def require_closed(self):
        if not self.closed:
            raise OpenCurveError("operation requires a closed curve")


@dataclass
class CrossSection:
    """Meridian-disk quadrature of a torus, oriented along the local azimuth.

    The unit normal agrees with the direction of travel of the core loop
    where the loop crosses the section.
    """

    torus: AxisymTorus
    points: np.ndarray
    normals: np.ndarray
    areas: np.ndarray

    @property
    def total_area(self) -> float:
        return float(np.sum(self.areas))


def core_loop(torus: AxisymTorus, n_seg: int = 256) -> PolylineCurve:
    """Core circle of the torus as a closed polyline (counterclockwise about e3)."""
    return torus.core_circle().polyline(n_seg)


def cross_section(
    torus: AxisymTorus, n_r: int = 32, n_phi: int = 64, azimuth: float = 0.0
) -> CrossSection:
    """Polar midpoint grid on the meridian disk at the given azimuth."""
    R, a = torus.major_radius, torus.minor_radius
    s = (np.arange(n_r) + 0.5) * a / n_r
    al = (np.arange(n_phi) + 0.5) * 2.0 * np.pi / n_phi
    S, A = np.meshgrid(s, al, indexing="ij")
    S, A = S.ravel(), A.ravel()
    d = np.array([np.cos(azimuth), np.sin(azimuth), 0.0])
    nrm = np.array([-np.sin(azimuth), np.cos(azimuth), 0.0])
    loc = (R + S * np.cos(A))[:, None] * d
    loc[:, 2] = S * np.sin(A)
    pts = torus.frame.to_world(loc)
    normal = torus.frame.vec_to_world(nrm)
    dA = S * (a / n_r) * (2.0 * np.pi / n_phi)
    normals = np.broadcast_to(normal, pts.shape).copy()
    return CrossSection(torus, pts, normals, dA)
