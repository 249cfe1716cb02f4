"""Biot-Savart operator, vector potential, and loop quadrature.

The operator integral is discretized as a dense O(N^2) midpoint sum over
masked source cells.  At a target that coincides with a source cell the
singular cell is skipped (principal-value rule); optional epsilon smoothing
regularizes the kernel instead.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SolenoidalWarning
from .fields import SampledField, curl, divergence
from .geometry import MaskedGrid, PolylineCurve

__all__ = [
    "BSOptions",
    "CurlInverseReport",
    "bs_field",
    "bs_sampled",
    "vector_potential",
    "verify_curl_inverse",
    "loop_integral",
]

FOUR_PI = 4.0 * np.pi
# fraction of h below which a source cell counts as coincident with a target
_SKIP_FRACTION = 1e-6


@dataclass
class BSOptions:
    """Quadrature knobs for the dense Biot-Savart sum.

    epsilon > 0 switches the kernel to (r^2 + epsilon^2)^{-3/2} smoothing;
    epsilon == 0 uses the skip-cell principal-value rule.
    """

    epsilon: float = 0.0
    check_solenoidal: bool = True

    def __post_init__(self):
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be >= 0")


def _check_source(source: SampledField):
    g = source.grid
    if not g.depth_mask(2).any():
        return
    d = divergence(source)
    eligible = g.depth_mask(2)
    nv = np.linalg.norm(source.values[eligible])
    if nv == 0.0:
        return
    rel = g.h * np.linalg.norm(d[eligible]) / nv
    if rel > 5e-2:
        warnings.warn(
            f"Biot-Savart source has stencil divergence {rel:.2e} relative to |V|/h",
            SolenoidalWarning,
            stacklevel=3,
        )


def _pair_sum(kernel, source: SampledField, targets, options, weights=None):
    opts = options or BSOptions()
    tgt = np.ascontiguousarray(np.atleast_2d(np.asarray(targets, dtype=float)))
    if opts.check_solenoidal:
        _check_source(source)
    h = source.grid.h
    w = np.full(source.grid.n_cells, h**3) if weights is None else weights
    out = kernel(
        np.ascontiguousarray(source.grid.centers),
        np.ascontiguousarray(source.values),
        np.ascontiguousarray(w),
        tgt,
        opts.epsilon**2,
        (_SKIP_FRACTION * h) ** 2,
    )
    return out / FOUR_PI


def bs_field(
    source: SampledField, targets, options: BSOptions | None = None
) -> np.ndarray:
    """Biot-Savart field of a sampled source at arbitrary target points.

    BS(V)(y) = (1/4pi) sum_cells V(x) x (y - x) / |y - x|^3 * h^3
    """
    return _pair_sum(_kernels.pair_cross_sum, source, targets, options)


def bs_sampled(source: SampledField, options: BSOptions | None = None) -> SampledField:
    """Biot-Savart field evaluated back on the source grid's masked cells."""
    return SampledField(
        source.grid, bs_field(source, source.grid.centers, options)
    )


def vector_potential(
    source: SampledField, targets, options: BSOptions | None = None
) -> np.ndarray:
    """Newtonian vector potential P(V)(y) = (1/4pi) sum V(x)/|y - x| h^3.

    Its curl reproduces bs_field away from the source cells.
    """
    return _pair_sum(_kernels.pair_inv_dist_sum, source, targets, options)


@dataclass
class CurlInverseReport:
    residual: float
    n_cells: int
    h: float
    field_norm: float


def verify_curl_inverse(
    source: SampledField, options: BSOptions | None = None
) -> CurlInverseReport:
    """Relative L2 residual of curl(BS(V)) - V over interior-depth >= 2 cells."""
    g = source.grid
    b = bs_sampled(source, options)
    c = curl(b)
    eligible = g.depth_mask(2)
    diff = np.linalg.norm(c.values[eligible] - source.values[eligible])
    ref = np.linalg.norm(source.values[eligible])
    if ref == 0.0:
        raise ValueError("source vanishes on all interior cells")
    return CurlInverseReport(float(diff / ref), int(eligible.sum()), g.h, float(ref))


def loop_integral(field_eval, curve: PolylineCurve) -> float:
    """Midpoint quadrature of the line integral of a field rule over a closed polyline."""
    curve.require_closed()
    f = np.asarray(field_eval(curve.midpoints), dtype=float)
    return float(np.sum(np.einsum("ij,ij->i", f, curve.edge_vectors)))


def grid_weights(grid: MaskedGrid) -> np.ndarray:
    """Uniform midpoint weights (h^3 per masked cell)."""
    return np.full(grid.n_cells, grid.cell_volume)
