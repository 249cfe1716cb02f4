"""Writhe, linking, helicity functionals, helicity differences, energy rate.

Helicity sign conventions follow the Gauss-kernel double integral
    H(V) = (1/4pi) int int V(x) x V(y) . (x - y)/|x - y|^3
which coincides with <V | BS(V)>; both code paths are kept.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .biot_savart import _SKIP_FRACTION, FOUR_PI, BSOptions, bs_field, bs_sampled
from .errors import CurlMismatchWarning, GridMismatchError, IntersectingCurvesError
from .fields import SampledField, curl, l2_inner
from .geometry import PolylineCurve, SurfacePatchSet, contains

__all__ = [
    "writhe",
    "linking_number",
    "HelicityReport",
    "helicity_double_integral",
    "helicity_bs",
    "mutual_helicity",
    "helicity_physical",
    "delta_h_volume",
    "delta_h_surface",
    "EnergyRateReport",
    "energy_rate",
]

_GAUSS_CHUNK = 512


@dataclass(frozen=True)
class HelicityReport:
    """A helicity value plus the method tag and quadrature bookkeeping."""

    value: float
    method: str
    h: float
    n_cells: int

    def __float__(self) -> float:
        return self.value

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "h": self.h,
            "n_cells": self.n_cells,
        }


def _gauss_double_sum(
    mids1, edges1, mids2, edges2, skip_diagonal: bool
) -> float:
    """(1/4pi) sum_ij (e1_i x e2_j) . (m1_i - m2_j)/|m1_i - m2_j|^3, chunked."""
    total = 0.0
    n = len(mids1)
    for lo in range(0, n, _GAUSS_CHUNK):
        hi = min(lo + _GAUSS_CHUNK, n)
        d = mids1[lo:hi, None, :] - mids2[None, :, :]
        r2 = np.sum(d * d, axis=-1)
        if skip_diagonal:
            idx = np.arange(lo, hi)
            r2[np.arange(hi - lo), idx] = np.inf
        cr = np.cross(edges1[lo:hi, None, :], edges2[None, :, :])
        total += float(np.sum(np.sum(cr * d, axis=-1) / (r2 * np.sqrt(r2))))
    return total / FOUR_PI


def writhe(curve: PolylineCurve) -> float:
    """Gauss self-integral of a closed polyline with midpoint tangents."""
    curve.require_closed()
    m, e = curve.midpoints, curve.edge_vectors
    return _gauss_double_sum(m, e, m, e, skip_diagonal=True)


def _min_point_distance(c1: PolylineCurve, c2: PolylineCurve) -> float:
    a = np.concatenate([c1.vertices, c1.midpoints])
    b = np.concatenate([c2.vertices, c2.midpoints])
    d = a[:, None, :] - b[None, :, :]
    return float(np.sqrt(np.min(np.sum(d * d, axis=-1))))


def linking_number(c1: PolylineCurve, c2: PolylineCurve) -> float:
    """Gauss linking integral of two disjoint closed polylines."""
    c1.require_closed()
    c2.require_closed()
    sep = _min_point_distance(c1, c2)
    scale = max(c1.length, c2.length)
    if sep < 1e-9 * scale:
        raise IntersectingCurvesError("curves touch or intersect")
    return _gauss_double_sum(
        c1.midpoints, c1.edge_vectors, c2.midpoints, c2.edge_vectors, False
    )


def helicity_double_integral(v: SampledField) -> HelicityReport:
    """Helicity by the direct double sum over cell pairs (self-pairs skipped)."""
    g = v.grid
    w = np.full(g.n_cells, g.cell_volume)
    part = _kernels.pair_triple_partials(
        np.ascontiguousarray(g.centers),
        np.ascontiguousarray(v.values),
        w,
        (_SKIP_FRACTION * g.h) ** 2,
    )
    value = float(np.sum(part)) / FOUR_PI
    return HelicityReport(value, "double_integral", g.h, g.n_cells)


def helicity_bs(v: SampledField, options: BSOptions | None = None) -> HelicityReport:
    """Helicity as <V | BS(V)> on the source grid."""
    value = l2_inner(v, bs_sampled(v, options))
    return HelicityReport(value, "bs_inner_product", v.grid.h, v.grid.n_cells)


def mutual_helicity(
    v1: SampledField, v2: SampledField, options: BSOptions | None = None
) -> float:
    """<V1 | BS(V2)> over V1's grid; the two domains must be disjoint.

    Disjointness is checked by cross-containment of cell centers, which
    accepts linked-but-disjoint tubes that bounding spheres would reject.
    """
    d1, d2 = v1.grid.domain, v2.grid.domain
    if contains(d2, v1.grid.centers).any() or contains(d1, v2.grid.centers).any():
        raise IntersectingCurvesError("field domains overlap")
    b = bs_field(v2, v1.grid.centers, options)
    return float(
        np.sum(np.einsum("ij,ij->i", v1.values, b)) * v1.grid.cell_volume
    )


def helicity_physical(u: SampledField, omega=None) -> HelicityReport:
    """Physical helicity <u | omega> with omega = curl u by stencil unless supplied.

    With a supplied omega (sampled on the same grid, or an analytic rule)
    the integral runs over every masked cell; the stencil path restricts to
    interior-depth >= 2 cells automatically.  The method tag records which
    path ran.
    """
    if omega is None:
        w = curl(u)
        method = "physical"
    elif isinstance(omega, SampledField):
        if not omega.grid.same_grid(u.grid):
            raise GridMismatchError("omega sampled on a different grid")
        w = omega
        method = "physical_supplied"
    else:
        w = SampledField(u.grid, np.asarray(omega(u.grid.centers), dtype=float))
        method = "physical_supplied"
    value = l2_inner(u, w)
    return HelicityReport(value, method, u.grid.h, u.grid.n_cells)


def _warn_curl_mismatch(u: SampledField, omega: SampledField):
    c = curl(u)
    eligible = u.grid.depth_mask(2)
    ref = np.linalg.norm(omega.values[eligible])
    if ref == 0.0:
        return
    rel = np.linalg.norm(c.values[eligible] - omega.values[eligible]) / ref
    if rel > 5e-2:
        warnings.warn(
            f"supplied omega differs from stencil curl(u) by {rel:.2e} relative L2",
            CurlMismatchWarning,
            stacklevel=3,
        )


def delta_h_volume(
    u: SampledField, omega: SampledField, options: BSOptions | None = None
) -> HelicityReport:
    """Volume form of the helicity difference: <u - BS(omega) | omega>."""
    if not u.grid.same_grid(omega.grid):
        raise GridMismatchError("u and omega must share a grid")
    _warn_curl_mismatch(u, omega)
    b = bs_sampled(omega, options)
    diff = u.values - b.values
    value = float(
        np.sum(np.einsum("ij,ij->i", diff, omega.values)) * u.grid.cell_volume
    )
    return HelicityReport(value, "delta_volume", u.grid.h, u.grid.n_cells)


def delta_h_surface(
    u_eval,
    omega: SampledField,
    boundary: SurfacePatchSet,
    options: BSOptions | None = None,
) -> HelicityReport:
    """Surface form of the helicity difference over the domain boundary.

    Equals the volume form when omega = curl u is tangent and solenoidal:
        Delta H = int_boundary (BS(omega) x u) . ds
    (sign fixed by the outward normal through the divergence theorem).
    """
    u_b = np.asarray(u_eval(boundary.points), dtype=float)
    bs_b = bs_field(omega, boundary.points, options)
    integrand = np.einsum("ij,ij->i", np.cross(bs_b, u_b), boundary.normals)
    value = float(np.sum(integrand * boundary.areas))
    return HelicityReport(value, "delta_surface", omega.grid.h, len(boundary.points))


@dataclass
class EnergyRateReport:
    total: float
    volume_term: float
    boundary_term: float


def energy_rate(
    omega: SampledField,
    w_eval,
    boundary: SurfacePatchSet | None = None,
    omega_eval=None,
) -> EnergyRateReport:
    """Transport energy rate  dE/dt = 2 <W | omega x curl omega> - oint |omega|^2 W . ds.

    The volume term uses the stencil curl (interior depth >= 2); the boundary
    term needs omega evaluable at the boundary samples and is dropped when no
    boundary is given (valid for interior-supported fields).
    """
    g = omega.grid
    c = curl(omega)
    w_cells = np.asarray(w_eval(g.centers), dtype=float)
    cross = np.cross(omega.values, c.values)
    vol = 2.0 * float(np.sum(np.einsum("ij,ij->i", w_cells, cross)) * g.cell_volume)
    bnd = 0.0
    if boundary is not None:
        if omega_eval is None:
            raise ValueError("boundary term requires an evaluable omega rule")
        ob = np.asarray(omega_eval(boundary.points), dtype=float)
        wb = np.asarray(w_eval(boundary.points), dtype=float)
        wn = np.einsum("ij,ij->i", wb, boundary.normals)
        bnd = float(np.sum(np.sum(ob * ob, axis=1) * wn * boundary.areas))
    return EnergyRateReport(vol - bnd, vol, bnd)
