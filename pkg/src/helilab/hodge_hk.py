"""Harmonic-knot subspace machinery for unions of disjoint solid tori.

For each torus the harmonic field l_i = phi_hat/(2 pi rho) has unit core
circulation; f_i = l_i / flux(l_i) has unit meridian-section flux.  The two
families are dual: <l_i | f_j> = delta_ij, circulations and fluxes are the
coordinates, and inner products of harmonic parts reduce to flux-times-
circulation sums.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .biot_savart import loop_integral
from .errors import NotCurlFreeError
from .fields import (
    HarmonicTorusField,
    LinearCombination,
    SampledField,
    curl,
    sample,
)
from .geometry import (
    AxisymTorus,
    CrossSection,
    MaskedGrid,
    PolylineCurve,
    core_loop,
    cross_section,
)

__all__ = [
    "HKBasis",
    "HKCoordinates",
    "build_hk_basis",
    "circulation",
    "flux",
    "gram_check",
    "hk_project",
    "harmonic_from_fluxes",
    "harmonic_from_circulations",
    "CurlFreeParts",
    "decompose_curlfree",
    "inner_product_flux_circ",
]

# polygon midpoint quadrature of the unit-circulation field carries a
# n*tan(pi/n)/pi factor; 4096 segments keep it below 1e-6
_LOOP_SEGMENTS = 4096


@dataclass
class HKBasis:
    tori: tuple
    loops: tuple
    sections: tuple
    l_fields: tuple
    f_fields: tuple
    fluxes: np.ndarray

    @property
    def n(self) -> int:
        return len(self.tori)


@dataclass
class HKCoordinates:
    circulations: np.ndarray
    fluxes: np.ndarray


def build_hk_basis(
    tori,
    n_seg: int = _LOOP_SEGMENTS,
    n_r: int = 48,
    n_phi: int = 64,
) -> HKBasis:
    """Harmonic basis, core loops, and sections for a list of disjoint tori.

    l_i vanishes outside torus i, so cross circulations and fluxes are
    exactly zero for disjoint supports.  Fluxes use the closed form
    R - sqrt(R^2 - a^2).
    """
    tori = tuple(tori)
    loops = tuple(core_loop(t, n_seg) for t in tori)
    sections = tuple(cross_section(t, n_r, n_phi) for t in tori)
    l_fields = tuple(HarmonicTorusField(t) for t in tori)
    fluxes = np.array([lf.section_flux for lf in l_fields])
    f_fields = tuple(
        LinearCombination([(1.0 / fl, lf)]) for fl, lf in zip(fluxes, l_fields)
    )
    return HKBasis(tori, loops, sections, l_fields, f_fields, fluxes)


def circulation(field_eval, loop: PolylineCurve) -> float:
    """Line integral of a field rule around a closed loop (midpoint rule)."""
    return loop_integral(field_eval, loop)


def flux(field_eval, section: CrossSection) -> float:
    """Flux of a field rule through a torus cross-section."""
    f = np.asarray(field_eval(section.points), dtype=float)
    return float(np.sum(np.einsum("ij,ij->i", f, section.normals) * section.areas))


def gram_check(basis: HKBasis, grids) -> np.ndarray:
    """Matrix of grid inner products <l_i | f_j>; expected identity.

    `grids` is one MaskedGrid per torus (quadrature over the union splits
    into per-part sums because the basis fields have disjoint supports).
    """
    grids = list(grids) if isinstance(grids, (list, tuple)) else [grids]
    n = basis.n
    g = np.zeros((n, n))
    for grid in grids:
        ls = [sample(lf, grid) for lf in basis.l_fields]
        fs = [sample(ff, grid) for ff in basis.f_fields]
        vol = grid.cell_volume
        for i in range(n):
            for j in range(n):
                g[i, j] += float(
                    np.sum(np.einsum("ij,ij->i", ls[i].values, fs[j].values)) * vol
                )
    return g


def hk_project(field_eval, basis: HKBasis) -> HKCoordinates:
    """Circulations around core loops and fluxes through sections."""
    kappas = np.array([circulation(field_eval, lp) for lp in basis.loops])
    phis = np.array([flux(field_eval, sc) for sc in basis.sections])
    return HKCoordinates(kappas, phis)


def harmonic_from_fluxes(basis: HKBasis, phis) -> LinearCombination:
    """Flux expansion sum_i Phi_i f_i of a harmonic part."""
    return LinearCombination(list(zip(np.asarray(phis, dtype=float), basis.f_fields)))


def harmonic_from_circulations(basis: HKBasis, kappas) -> LinearCombination:
    """Circulation expansion sum_i kappa_i l_i of a harmonic part."""
    return LinearCombination(list(zip(np.asarray(kappas, dtype=float), basis.l_fields)))


@dataclass
class CurlFreeParts:
    harmonic: LinearCombination
    coords: HKCoordinates
    remainder_circulations: np.ndarray


def decompose_curlfree(
    v_eval,
    basis: HKBasis,
    grid: MaskedGrid | None = None,
    gate: float = 5e-2,
) -> CurlFreeParts:
    """Split a curl-free field into its harmonic part and a gradient remainder.

    The harmonic part is sum_i kappa_i(v) l_i; the remainder has (reported)
    vanishing circulations and is globally a gradient.  When a grid is given
    the field must pass the stencil curl-free gate first, with the smallest
    minor radius as the length scale.
    """
    if grid is not None:
        v = sample(v_eval, grid)
        c = curl(v)
        eligible = grid.depth_mask(2)
        ref = np.linalg.norm(v.values[eligible])
        a_ref = min(t.minor_radius for t in basis.tori)
        if ref > 0.0:
            rel = a_ref * np.linalg.norm(c.values[eligible]) / ref
            if rel > gate:
                raise NotCurlFreeError(
                    f"stencil curl {rel:.2e} exceeds the curl-free gate {gate:.1e}"
                )
    kappas = np.array([circulation(v_eval, lp) for lp in basis.loops])
    upsilon = harmonic_from_circulations(basis, kappas)

    def remainder(pts):
        return np.asarray(v_eval(pts), dtype=float) - upsilon(pts)

    rem_circ = np.array([circulation(remainder, lp) for lp in basis.loops])
    phis = np.array([flux(v_eval, sc) for sc in basis.sections])
    return CurlFreeParts(upsilon, HKCoordinates(kappas, phis), rem_circ)


def inner_product_flux_circ(f1_eval, f2_eval, basis: HKBasis) -> tuple[float, float]:
    """L2 inner product of two harmonic parts via flux/circulation coordinates.

    Returns (mean of the two orderings, their absolute difference):
    sum_i Phi_i(f1) kappa_i(f2) and sum_i Phi_i(f2) kappa_i(f1) agree for
    exact harmonic fields.
    """
    c1 = hk_project(f1_eval, basis)
    c2 = hk_project(f2_eval, basis)
    v12 = float(np.dot(c1.fluxes, c2.circulations))
    v21 = float(np.dot(c2.fluxes, c1.circulations))
    return 0.5 * (v12 + v21), abs(v12 - v21)


def delta_h_flux_circulation(upsilon_eval, omega_eval, basis: HKBasis):
    """Helicity difference as sum_i Phi_i(omega) kappa_i(Upsilon).

    Upsilon is the harmonic part of u - BS(omega); gradients drop out of the
    loop circulations, so passing the raw difference field works too.
    """
    from .functionals import HelicityReport

    kappas = np.array([circulation(upsilon_eval, lp) for lp in basis.loops])
    phis = np.array([flux(omega_eval, sc) for sc in basis.sections])
    value = float(np.dot(phis, kappas))
    n = sum(len(sc.points) for sc in basis.sections)
    return HelicityReport(value, "flux_circulation", 0.0, n)
