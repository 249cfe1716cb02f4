"""Magnetic helicities: Biot-Savart form, potential form, gauge drift, cross helicity.

The vector potential of a sampled magnetic field is built with the
Biot-Savart operator itself: curl(BS(B)) = B for solenoidal tangent B, so
A = BS(B) (plus optional harmonic offsets kappa_i l_i on tori, which change
the gauge class but not curl A).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .biot_savart import BSOptions, bs_field, bs_sampled
from .errors import GridMismatchError, NotCurlFreeError, OverlapError
from .fields import SampledField, curl, l2_inner, sample
from .functionals import helicity_bs
from .hodge_hk import HKBasis, flux, harmonic_from_circulations
from .geometry import contains
from .transport import FlowFamily, conservation_sweep

__all__ = [
    "GaugeChoice",
    "MagneticState",
    "make_magnetic_state",
    "magnetic_bs_helicity",
    "potential_helicity",
    "HMRateReport",
    "hm_rate",
    "hm_rate_fd_check",
    "cross_helicity",
    "ThinTubeReport",
    "thin_tube_check",
    "helicity_difference_mhd",
]

_CURL_GATE = 5e-2


@dataclass
class GaugeChoice:
    """Gauge freedom of the induction potential: harmonic coefficients kappa_m
    (one per handlebody) and an optional single-valued scalar part (which
    never moves the potential helicity)."""

    kappa_m: np.ndarray
    phi: object = None

    def __post_init__(self):
        self.kappa_m = np.atleast_1d(np.asarray(self.kappa_m, dtype=float))


@dataclass
class MagneticState:
    b: SampledField
    a: SampledField
    curl_residual: float


def make_magnetic_state(
    b: SampledField,
    basis: HKBasis | None = None,
    offsets=None,
    options: BSOptions | None = None,
) -> MagneticState:
    """Build A = BS(B) (+ sum_i offsets_i l_i) on B's grid and record the
    relative stencil residual of curl A - B at interior depth >= 2."""
    a_vals = bs_sampled(b, options).values
    if offsets is not None:
        if basis is None:
            raise ValueError("harmonic offsets need a basis")
        off = harmonic_from_circulations(basis, offsets)
        a_vals = a_vals + off(b.grid.centers)
    a = SampledField(b.grid, a_vals)
    c = curl(a)
    eligible = b.grid.depth_mask(2)
    ref = np.linalg.norm(b.values[eligible])
    res = float(np.linalg.norm(c.values[eligible] - b.values[eligible]) / ref) if ref else 0.0
    return MagneticState(b, a, res)


def magnetic_bs_helicity(b: SampledField, options: BSOptions | None = None) -> float:
    """H_BS(B) = <B | BS(B)>; conserved under any frozen-field transport."""
    return float(helicity_bs(b, options))


def potential_helicity(state: MagneticState, gate: float = _CURL_GATE) -> float:
    """H_M = <A | B>; requires the state's curl residual to pass the gate."""
    if state.curl_residual > gate:
        raise NotCurlFreeError(
            f"curl A misses B by {state.curl_residual:.2e} (gate {gate:.1e})"
        )
    return l2_inner(state.a, state.b)


@dataclass
class HMRateReport:
    formula: float
    l2: float
    fluxes: np.ndarray
    kappas: np.ndarray


def hm_rate(gauge: GaugeChoice, b_eval, basis: HKBasis, grid=None) -> HMRateReport:
    """dH_M/dt = sum_i Phi^M_i kappa^M_i, plus the direct L2 form <Pi | B>.

    Phi^M_i is the flux of B through section i; Pi = sum_i kappa^M_i l_i.
    When a grid is supplied the L2 form is evaluated on it, otherwise it is
    reported equal to the formula.
    """
    phis = np.array([flux(b_eval, sec) for sec in basis.sections])
    formula = float(np.dot(phis, gauge.kappa_m))
    if grid is not None:
        pi = sample(harmonic_from_circulations(basis, gauge.kappa_m), grid)
        bb = sample(b_eval, grid)
        l2 = l2_inner(pi, bb)
    else:
        l2 = formula
    return HMRateReport(formula, l2, phis, gauge.kappa_m.copy())


def hm_rate_fd_check(
    state: MagneticState,
    u_eval,
    gauge: GaugeChoice,
    basis: HKBasis,
    dt: float,
) -> float:
    """One explicit Euler step of dA/dt = u x B + Pi; returns (H_M' - H_M)/dt.

    B advances by the stencil curl of the step, B' = B + dt curl(u x B + Pi),
    which preserves B' - B = curl(A' - A) discretely while keeping the
    full-mass B at both endpoints (pairing A with a zero-filled stencil curl
    of A itself would drop the boundary collar where central stencils do not
    fit).  The caller must supply a velocity tangent to the domain boundary,
    or one whose u x B vanishes there.
    """
    g = state.b.grid
    uxb = np.cross(np.asarray(u_eval(g.centers), dtype=float), state.b.values)
    pi = harmonic_from_circulations(basis, gauge.kappa_m)(g.centers)
    a_new = SampledField(g, state.a.values + dt * (uxb + pi))
    db = curl(SampledField(g, uxb + pi))
    b_new = SampledField(g, state.b.values + dt * db.values)
    hm0 = l2_inner(state.a, state.b)
    hm1 = l2_inner(a_new, b_new)
    return (hm1 - hm0) / dt


def cross_helicity(u: SampledField, b: SampledField) -> float:
    """H_C = <u | B> on a shared grid."""
    if not u.grid.same_grid(b.grid):
        raise GridMismatchError("u and B must share a grid")
    return l2_inner(u, b)


@dataclass
class ThinTubeReport:
    h_c: float
    expected: float
    link: float
    discrepancy: float


def thin_tube_check(
    omega_tube,
    b_tube,
    grid_b,
    link_segments: int = 256,
    options: BSOptions | None = None,
) -> ThinTubeReport:
    """Cross helicity of two linked thin tubes against Link * Phi_B * Phi_omega.

    u = BS(omega tube) evaluated on the B tube's grid, so curl u equals the
    omega tube's field and H_C = <u | B> approaches the linking form as the
    tubes thin.
    """
    from .functionals import linking_number
    from .geometry import build_grid

    grid_w = build_grid(omega_tube.support, grid_b.h)
    if (
        contains(b_tube.support, grid_w.centers).any()
        or contains(omega_tube.support, grid_b.centers).any()
    ):
        raise OverlapError("tube supports overlap")
    src = sample(omega_tube, grid_w)
    u_vals = bs_field(src, grid_b.centers, options)
    b_vals = sample(b_tube, grid_b)
    h_c = float(
        np.sum(np.einsum("ij,ij->i", u_vals, b_vals.values)) * grid_b.cell_volume
    )
    c1 = omega_tube.circle.polyline(link_segments)
    c2 = b_tube.circle.polyline(link_segments)
    link = linking_number(c1, c2)
    expected = link * omega_tube.flux * b_tube.flux
    return ThinTubeReport(h_c, expected, link, abs(h_c - expected))


def helicity_difference_mhd(
    u: SampledField, a: SampledField, b: SampledField, alpha: float
) -> tuple[float, float]:
    """<u - alpha A | B> both directly and as H_C - alpha H_M; returns (direct, composed)."""
    if not (u.grid.same_grid(a.grid) and u.grid.same_grid(b.grid)):
        raise GridMismatchError("u, A, B must share a grid")
    direct = l2_inner(SampledField(u.grid, u.values - alpha * a.values), b)
    composed = l2_inner(u, b) - alpha * l2_inner(a, b)
    return direct, composed


def frozen_field_drift(
    family: FlowFamily, b0, times, grid0
) -> float:
    """Max relative drift of H_BS(B_t) along a frozen-field transport sweep."""
    res = conservation_sweep(family, b0, times, grid0)
    h = np.array([r.h_bs for r in res.rows])
    return float(np.max(np.abs(h - h[0])) / abs(h[0]))
