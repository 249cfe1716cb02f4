"""Flow families, transported fields, and conservation sweeps.

A flow family supplies, for any time t: the map y = h_t(x), its inverse,
the deformation gradient Lambda = dy/dx with determinant J, and the
velocity W_t(y) = (d h_t/dt)(h_t^{-1}(y)).  Fields are transported by the
compressible pushforward
    omega_t(y) = Lambda(x) omega_0(x) / J(x),
surfaces by the cofactor rule ds_t = J Lambda^{-T} ds_0, so conservation
sweeps can pull every integral back to the fixed t=0 grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .biot_savart import FOUR_PI, _SKIP_FRACTION
from . import _kernels
from .errors import SingularFlowError
from .fields import DensityField
from .geometry import MaskedGrid, SurfacePatchSet

__all__ = [
    "RigidRotation",
    "UniformPulsation",
    "DifferentialTwist",
    "RadialCompress",
    "Composite",
    "FlowSample",
    "evaluate_flow",
    "TransportedState",
    "transported_field",
    "ContinuityReport",
    "continuity_residual",
    "transport_pde_residual",
    "SweepRow",
    "SweepResult",
    "conservation_sweep",
]

_FD_JACOBIAN_STEP = 1e-5


def _rodrigues(axis: np.ndarray, angle: float) -> np.ndarray:
    a = axis
    k = np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    return np.eye(3) * np.cos(angle) + np.sin(angle) * k + (1.0 - np.cos(angle)) * np.outer(a, a)


class FlowFamily:
    """Base interface; all methods are vectorized over (n,3) point arrays."""

    def map(self, t: float, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inverse(self, t: float, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, t: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Deformation gradient (n,3,3) and determinant (n,) at material points x."""
        raise NotImplementedError

    def velocity(self, t: float, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class RigidRotation(FlowFamily):
    """Rotation about an axis through the origin with constant angular rate."""

    def __init__(self, axis, rate: float):
        a = np.asarray(axis, dtype=float).reshape(3)
        n = np.linalg.norm(a)
        if n == 0.0:
            raise ValueError("zero rotation axis")
        self.axis = a / n
        self.rate = float(rate)

    def map(self, t, x):
        return x @ _rodrigues(self.axis, self.rate * t).T

    def inverse(self, t, y):
        return y @ _rodrigues(self.axis, self.rate * t)

    def jacobian(self, t, x):
        r = _rodrigues(self.axis, self.rate * t)
        lam = np.broadcast_to(r, (len(x), 3, 3)).copy()
        return lam, np.ones(len(x))

    def velocity(self, t, y):
        return self.rate * np.cross(self.axis, y)


class UniformPulsation(FlowFamily):
    """Isotropic scaling y = s(t) x with s(t) = 1 + A sin(nu t), 0 < A < 1."""

    def __init__(self, amplitude: float, frequency: float = 1.0):
        if not 0.0 < amplitude < 1.0:
            raise ValueError("amplitude must lie in (0, 1)")
        self.amplitude = float(amplitude)
        self.frequency = float(frequency)

    def scale(self, t: float) -> float:
        return 1.0 + self.amplitude * np.sin(self.frequency * t)

    def scale_rate(self, t: float) -> float:
        return self.amplitude * self.frequency * np.cos(self.frequency * t)

    def map(self, t, x):
        return self.scale(t) * x

    def inverse(self, t, y):
        return y / self.scale(t)

    def jacobian(self, t, x):
        s = self.scale(t)
        lam = np.broadcast_to(s * np.eye(3), (len(x), 3, 3)).copy()
        return lam, np.full(len(x), s**3)

    def velocity(self, t, y):
        return (self.scale_rate(t) / self.scale(t)) * y


class DifferentialTwist(FlowFamily):
    """Azimuthal shear about the z axis: each sphere |x| = r rotates rigidly
    by the angle t * rate * exp(-r^2/sigma^2).  Volume preserving (J = 1)."""

    def __init__(self, rate: float, width: float):
        if width <= 0.0:
            raise ValueError("width must be positive")
        self.rate = float(rate)
        self.width = float(width)

    def _angle(self, t, r2):
        return t * self.rate * np.exp(-r2 / self.width**2)

    @staticmethod
    def _rotate_z(x, theta):
        c, s = np.cos(theta), np.sin(theta)
        out = np.empty_like(x)
        out[:, 0] = c * x[:, 0] - s * x[:, 1]
        out[:, 1] = s * x[:, 0] + c * x[:, 1]
        out[:, 2] = x[:, 2]
        return out

    def map(self, t, x):
        return self._rotate_z(x, self._angle(t, np.sum(x * x, axis=1)))

    def inverse(self, t, y):
        return self._rotate_z(y, -self._angle(t, np.sum(y * y, axis=1)))

    def jacobian(self, t, x):
        r2 = np.sum(x * x, axis=1)
        theta = self._angle(t, r2)
        c, s = np.cos(theta), np.sin(theta)
        n = len(x)
        lam = np.zeros((n, 3, 3))
        lam[:, 0, 0] = c
        lam[:, 0, 1] = -s
        lam[:, 1, 0] = s
        lam[:, 1, 1] = c
        lam[:, 2, 2] = 1.0
        y = self._rotate_z(x, theta)
        zxy = np.column_stack([-y[:, 1], y[:, 0], np.zeros(n)])
        grad_theta = (-2.0 * theta / self.width**2)[:, None] * x
        lam += zxy[:, :, None] * grad_theta[:, None, :]
        return lam, np.ones(n)

    def velocity(self, t, y):
        r2 = np.sum(y * y, axis=1)  # |y| = |x| under the twist
        dtheta = self.rate * np.exp(-r2 / self.width**2)
        return dtheta[:, None] * np.column_stack(
            [-y[:, 1], y[:, 0], np.zeros(len(y))]
        )


class RadialCompress(FlowFamily):
    """Radial squeeze r -> r (1 + A sin(nu t) exp(-r^2/sigma^2)), 0 < A < 1.

    The radial stretch is monotone for A < 1, so the inverse is a scalar
    Newton solve per point.  Lambda and J come from central finite
    differences with step 1e-5.
    """

    def __init__(self, amplitude: float, width: float, frequency: float = 1.0):
        if not 0.0 < amplitude < 1.0:
            raise ValueError("amplitude must lie in (0, 1)")
        if width <= 0.0:
            raise ValueError("width must be positive")
        self.amplitude = float(amplitude)
        self.width = float(width)
        self.frequency = float(frequency)

    def _g(self, t, r):
        return 1.0 + self.amplitude * np.sin(self.frequency * t) * np.exp(
            -(r * r) / self.width**2
        )

    def map(self, t, x):
        r = np.linalg.norm(x, axis=1)
        return x * self._g(t, r)[:, None]

    def inverse(self, t, y):
        rho = np.linalg.norm(y, axis=1)
        b = self.amplitude * np.sin(self.frequency * t)
        w2 = self.width**2
        r = rho.copy()
        for _ in range(60):
            e = np.exp(-(r * r) / w2)
            f = r * (1.0 + b * e) - rho
            fp = 1.0 + b * e * (1.0 - 2.0 * r * r / w2)
            r = r - f / fp
            if np.max(np.abs(f)) <= 1e-14 * max(1.0, float(np.max(rho))):
                break
        scale = np.where(rho > 0.0, r / np.where(rho > 0.0, rho, 1.0), 1.0)
        return y * scale[:, None]

    def jacobian(self, t, x):
        d = _FD_JACOBIAN_STEP
        n = len(x)
        lam = np.empty((n, 3, 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = d
            lam[:, :, j] = (self.map(t, x + e) - self.map(t, x - e)) / (2.0 * d)
        return lam, np.linalg.det(lam)

    def velocity(self, t, y):
        x = self.inverse(t, y)
        r = np.linalg.norm(x, axis=1)
        gdot = (
            self.amplitude
            * self.frequency
            * np.cos(self.frequency * t)
            * np.exp(-(r * r) / self.width**2)
        )
        return x * gdot[:, None]


class Composite(FlowFamily):
    """Composition of stages; stages[0] acts first."""

    def __init__(self, stages):
        self.stages = list(stages)
        if not self.stages:
            raise ValueError("composite needs at least one stage")

    def map(self, t, x):
        for s in self.stages:
            x = s.map(t, x)
        return x

    def inverse(self, t, y):
        for s in reversed(self.stages):
            y = s.inverse(t, y)
        return y

    def _chain_points(self, t, x):
        pts = [x]
        for s in self.stages:
            pts.append(s.map(t, pts[-1]))
        return pts

    def jacobian(self, t, x):
        pts = self._chain_points(t, x)
        lam, det = self.stages[0].jacobian(t, pts[0])
        for s, p in zip(self.stages[1:], pts[1:-1]):
            lam_s, det_s = s.jacobian(t, p)
            lam = np.einsum("nij,njk->nik", lam_s, lam)
            det = det * det_s
        return lam, det

    def velocity(self, t, y):
        pts = self._chain_points(t, self.inverse(t, y))
        w = self.stages[0].velocity(t, pts[1])
        for s, p_in, p_out in zip(self.stages[1:], pts[1:-1], pts[2:]):
            lam_s, _ = s.jacobian(t, p_in)
            w = s.velocity(t, p_out) + np.einsum("nij,nj->ni", lam_s, w)
        return w


@dataclass
class FlowSample:
    points: np.ndarray
    images: np.ndarray
    lam: np.ndarray
    det: np.ndarray
    velocity: np.ndarray


def evaluate_flow(family: FlowFamily, t: float, points) -> FlowSample:
    """Map, deformation gradient, determinant, and velocity at material points."""
    x = np.atleast_2d(np.asarray(points, dtype=float))
    y = family.map(t, x)
    lam, det = family.jacobian(t, x)
    if np.any(det <= 0.0):
        raise SingularFlowError("flow Jacobian determinant is not positive")
    return FlowSample(x, y, lam, det, family.velocity(t, y))


@dataclass
class TransportedState:
    """Transported field and density rules at one time."""

    family: FlowFamily
    t: float
    omega0: object
    density0: DensityField

    def field(self, pts) -> np.ndarray:
        y = np.atleast_2d(np.asarray(pts, dtype=float))
        x = self.family.inverse(self.t, y)
        lam, det = self.family.jacobian(self.t, x)
        w0 = np.asarray(self.omega0(x), dtype=float)
        return np.einsum("nij,nj->ni", lam, w0) / det[:, None]

    def density(self, pts) -> np.ndarray:
        y = np.atleast_2d(np.asarray(pts, dtype=float))
        x = self.family.inverse(self.t, y)
        _, det = self.family.jacobian(self.t, x)
        return np.asarray(self.density0(x), dtype=float) / det

    def __call__(self, pts) -> np.ndarray:
        return self.field(pts)


def transported_field(
    family: FlowFamily, t: float, omega0, density0: DensityField | None = None
) -> TransportedState:
    """State carrying omega_t(y) = Lambda omega_0(x) / J and lambda_t = lambda_0 / J."""
    return TransportedState(family, t, omega0, density0 or DensityField())


@dataclass
class ContinuityReport:
    max_abs: float
    scale: float
    rel: float


def continuity_residual(
    family: FlowFamily,
    times,
    probes,
    dt: float = 1e-4,
    dx: float = 1e-4,
) -> ContinuityReport:
    """Residual of d(lambda)/dt + div(lambda W) at fixed spatial probes.

    Probes must stay inside the transported domain for all sampled times.
    Derivatives are central differences (dt in time, dx per axis in space).
    """
    p = np.atleast_2d(np.asarray(probes, dtype=float))
    worst = 0.0
    scale = 0.0
    for t in np.atleast_1d(np.asarray(times, dtype=float)):
        lam_p = transported_field(family, t + dt, lambda q: q).density(p)
        lam_m = transported_field(family, t - dt, lambda q: q).density(p)
        dldt = (lam_p - lam_m) / (2.0 * dt)
        state = transported_field(family, t, lambda q: q)
        div = np.zeros(len(p))
        for j in range(3):
            e = np.zeros(3)
            e[j] = dx
            fp = state.density(p + e) * family.velocity(t, p + e)[:, j]
            fm = state.density(p - e) * family.velocity(t, p - e)[:, j]
            div += (fp - fm) / (2.0 * dx)
        res = dldt + div
        worst = max(worst, float(np.max(np.abs(res))))
        scale = max(scale, float(np.max(np.abs(dldt))), float(np.max(np.abs(div))))
    rel = worst / scale if scale > 0.0 else 0.0
    return ContinuityReport(worst, scale, rel)


def _rule_curl(rule, pts: np.ndarray, step: float) -> np.ndarray:
    """Central-difference curl of a point rule, componentwise step `step`."""
    grads = []
    for j in range(3):
        e = np.zeros(3)
        e[j] = step
        grads.append(
            (np.asarray(rule(pts + e), float) - np.asarray(rule(pts - e), float))
            / (2.0 * step)
        )
    gx, gy, gz = grads
    return np.column_stack(
        [
            gy[:, 2] - gz[:, 1],
            gz[:, 0] - gx[:, 2],
            gx[:, 1] - gy[:, 0],
        ]
    )


def transport_pde_residual(
    family: FlowFamily,
    t: float,
    omega0,
    grid: MaskedGrid,
    dt: float = 1e-4,
) -> float:
    """Relative L2 residual of d(omega)/dt = curl(W x omega) on an image-domain grid.

    The time derivative is a centered difference of the transported rule at
    fixed grid points; the curl is the grid stencil at interior depth >= 2.
    """
    from .fields import SampledField, curl as stencil_curl

    pts = grid.centers
    f_p = transported_field(family, t + dt, omega0).field(pts)
    f_m = transported_field(family, t - dt, omega0).field(pts)
    dwdt = (f_p - f_m) / (2.0 * dt)
    w_vel = family.velocity(t, pts)
    cur = transported_field(family, t, omega0).field(pts)
    cross = np.cross(w_vel, cur)
    c = stencil_curl(SampledField(grid, cross))
    eligible = grid.depth_mask(2)
    num = np.linalg.norm(dwdt[eligible] - c.values[eligible])
    den = max(
        np.linalg.norm(dwdt[eligible]), np.linalg.norm(c.values[eligible])
    )
    return float(num / den) if den > 0.0 else 0.0


@dataclass
class SweepRow:
    t: float
    h_bs: float
    energy: float
    dedt_formula: float
    dedt_fd: float
    fluxes: np.ndarray


@dataclass
class SweepResult:
    rows: list
    n_sections: int

    def header(self) -> list[str]:
        return ["t", "H_bs", "E", "dEdt_formula", "dEdt_fd"] + [
            f"phi_{i + 1}" for i in range(self.n_sections)
        ]

    def table(self) -> np.ndarray:
        return np.array(
            [
                [r.t, r.h_bs, r.energy, r.dedt_formula, r.dedt_fd, *r.fluxes]
                for r in self.rows
            ]
        )


def _pushforward_arrays(family, t, omega0, grid):
    """Image points, transported values, and quadrature weights J h^3."""
    x = grid.centers
    y = family.map(t, x)
    lam, det = family.jacobian(t, x)
    if np.any(det <= 0.0):
        raise SingularFlowError("flow Jacobian determinant is not positive")
    vals = np.einsum("nij,nj->ni", lam, np.asarray(omega0(x), float)) / det[:, None]
    return y, vals, det * grid.cell_volume, det


def _pullback_helicity(y, vals, weights, h):
    b = _kernels.pair_cross_sum(
        np.ascontiguousarray(y),
        np.ascontiguousarray(vals),
        np.ascontiguousarray(weights),
        np.ascontiguousarray(y),
        0.0,
        (_SKIP_FRACTION * h) ** 2,
    ) / FOUR_PI
    return float(np.sum(np.einsum("ij,ij->i", vals, b) * weights))


def _transported_surface(family, t, patch: SurfacePatchSet):
    """Image points and transported oriented area elements J Lambda^{-T} n dA."""
    lam, det = family.jacobian(t, patch.points)
    y = family.map(t, patch.points)
    n_t = np.linalg.solve(
        np.transpose(lam, (0, 2, 1)), patch.normals[:, :, None]
    )[:, :, 0]
    return y, n_t * (det * patch.areas)[:, None]


def conservation_sweep(
    family: FlowFamily,
    omega0,
    times,
    grid0: MaskedGrid,
    boundary0: SurfacePatchSet | None = None,
    sections0=None,
    fd_dt: float | None = None,
) -> SweepResult:
    """Track H_bs, energy, the energy-rate identity, and section fluxes along a flow.

    Every integral is pulled back to the fixed t=0 grid: sources and targets
    sit at image points y = h_t(x) with weights J h^3, surfaces transport by
    the cofactor rule.  dEdt_formula is the instantaneous identity
    2 <W | omega x curl omega> - oint |omega|^2 W . ds; dEdt_fd is a centered
    difference of the energy with step 1e-4 times the sweep span.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    span = float(times.max() - times.min()) if len(times) > 1 else 1.0
    dt = fd_dt if fd_dt is not None else 1e-4 * max(span, 1e-30)
    sections0 = list(sections0 or [])
    rows = []
    for t in times:
        y, vals, wq, _ = _pushforward_arrays(family, t, omega0, grid0)
        h_bs = _pullback_helicity(y, vals, wq, grid0.h)
        energy = float(np.sum(np.sum(vals * vals, axis=1) * wq))

        # The curl differentiates the transported rule, which is defined on
        # all of space, so the volume term runs over every cell of the
        # pushed-forward quadrature rather than a depth-restricted interior.
        state = transported_field(family, t, omega0)
        w_vel = family.velocity(t, y)
        cur = _rule_curl(state.field, y, 0.125 * grid0.h)
        vol = 2.0 * float(
            np.sum(np.einsum("ij,ij->i", w_vel, np.cross(vals, cur)) * wq)
        )
        bnd = 0.0
        if boundary0 is not None:
            yb, ds_t = _transported_surface(family, t, boundary0)
            lam_b, det_b = family.jacobian(t, boundary0.points)
            ob = (
                np.einsum(
                    "nij,nj->ni", lam_b, np.asarray(omega0(boundary0.points), float)
                )
                / det_b[:, None]
            )
            wb = family.velocity(t, yb)
            bnd = float(
                np.sum(np.sum(ob * ob, axis=1) * np.einsum("ij,ij->i", wb, ds_t))
            )

        def _energy_at(tt):
            _, v, w, _ = _pushforward_arrays(family, tt, omega0, grid0)
            return float(np.sum(np.sum(v * v, axis=1) * w))

        dedt_fd = (_energy_at(t + dt) - _energy_at(t - dt)) / (2.0 * dt)

        fluxes = np.zeros(len(sections0))
        for i, sec in enumerate(sections0):
            ys, ds_t = _transported_surface(family, t, sec)
            lam_s, det_s = family.jacobian(t, sec.points)
            os_ = (
                np.einsum("nij,nj->ni", lam_s, np.asarray(omega0(sec.points), float))
                / det_s[:, None]
            )
            fluxes[i] = float(np.sum(np.einsum("ij,ij->i", os_, ds_t)))

        rows.append(SweepRow(float(t), h_bs, energy, vol - bnd, dedt_fd, fluxes))
    return SweepResult(rows, len(sections0))
