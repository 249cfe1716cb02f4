import numpy as np
import pytest

import helilab as hl
import oracles

PTS = np.array([[0.4, 0.1, -0.2], [0.8, -0.3, 0.3], [0.2, 0.5, 0.6]])


@pytest.fixture(scope="module")
def offset_tube():
    # Core circle away from the origin so twist and pulsation actually move
    # the energy; an origin-centered circle sits in every degeneracy.
    return hl.make_tube_field(
        hl.Circle(hl.Frame.from_axis((0.6, 0.0, 0.3), (1.0, 0.0, 0.0)), 1.0), 0.4, 1.0
    )


@pytest.fixture(scope="module")
def offset_grid(offset_tube):
    return hl.build_grid(offset_tube.support, 0.1)


def test_rigid_rotation_is_isometry():
    fam = hl.RigidRotation((0.0, 0.0, 1.0), 0.7)
    fs = hl.evaluate_flow(fam, 0.9, PTS)
    assert np.allclose(np.linalg.norm(fs.images, axis=1), np.linalg.norm(PTS, axis=1))
    assert np.allclose(fs.det, 1.0)
    assert np.allclose(fs.velocity, 0.7 * np.cross([0.0, 0.0, 1.0], fs.images))
    assert np.allclose(fam.inverse(0.9, fs.images), PTS, atol=1e-14)
    # quarter turn at rate 0.7: t = (pi/2)/0.7 reproduces the exact rotation
    quarter = fam.map(np.pi / 2.0 / 0.7, PTS)
    assert np.allclose(quarter, oracles.rotate_90z(PTS), atol=1e-14)


def test_rotation_rejects_zero_axis():
    with pytest.raises(ValueError):
        hl.RigidRotation((0.0, 0.0, 0.0), 1.0)


def test_uniform_pulsation_scaling():
    fam = hl.UniformPulsation(0.3, frequency=1.0)
    t = 0.8
    s = oracles.pulsation_scale(0.3, 1.0, t)
    fs = hl.evaluate_flow(fam, t, PTS)
    assert np.allclose(fs.images, s * PTS)
    assert np.allclose(fs.det, s**3)
    sdot = 0.3 * np.cos(t)
    assert np.allclose(fs.velocity, (sdot / s) * fs.images)
    assert np.allclose(fam.inverse(t, fs.images), PTS)


@pytest.mark.parametrize("amp", [0.0, 1.0, 1.2, -0.1])
def test_pulsation_amplitude_range(amp):
    with pytest.raises(ValueError):
        hl.UniformPulsation(amp)


def test_differential_twist_preserves_volume_and_radius():
    fam = hl.DifferentialTwist(0.8, 1.2)
    fs = hl.evaluate_flow(fam, 0.7, PTS)
    assert np.all(fs.det == 1.0)
    assert np.allclose(np.linalg.norm(fs.images, axis=1), np.linalg.norm(PTS, axis=1))
    assert np.allclose(fam.inverse(0.7, fs.images), PTS, atol=1e-14)


def test_twist_jacobian_matches_finite_differences():
    fam = hl.DifferentialTwist(0.8, 1.2)
    lam, _ = fam.jacobian(0.7, PTS)
    d = 1e-6
    for j in range(3):
        e = np.zeros(3)
        e[j] = d
        col = (fam.map(0.7, PTS + e) - fam.map(0.7, PTS - e)) / (2.0 * d)
        assert np.allclose(lam[:, :, j], col, atol=1e-6)


def test_radial_compress_inverse_and_velocity():
    fam = hl.RadialCompress(0.3, 1.2)
    t = 0.6
    y = fam.map(t, PTS)
    assert np.allclose(fam.inverse(t, y), PTS, atol=1e-12)
    dt = 1e-6
    vel_fd = (fam.map(t + dt, PTS) - fam.map(t - dt, PTS)) / (2.0 * dt)
    assert np.allclose(fam.velocity(t, y), vel_fd, atol=1e-6)
    _, det = fam.jacobian(t, PTS)
    assert np.all(det > 0.0)


def test_composite_chains_stages():
    rot = hl.RigidRotation((0.0, 0.0, 1.0), 0.5)
    pul = hl.UniformPulsation(0.2)
    fam = hl.Composite([rot, pul])
    t = 0.9
    assert np.allclose(fam.map(t, PTS), pul.map(t, rot.map(t, PTS)))
    assert np.allclose(fam.inverse(t, fam.map(t, PTS)), PTS, atol=1e-12)
    lam, det = fam.jacobian(t, PTS)
    d = 1e-6
    for j in range(3):
        e = np.zeros(3)
        e[j] = d
        col = (fam.map(t, PTS + e) - fam.map(t, PTS - e)) / (2.0 * d)
        assert np.allclose(lam[:, :, j], col, atol=1e-6)
    assert np.allclose(det, pul.scale(t) ** 3)
    y = fam.map(t, PTS)
    dt = 1e-6
    vel_fd = (fam.map(t + dt, PTS) - fam.map(t - dt, PTS)) / (2.0 * dt)
    assert np.allclose(fam.velocity(t, y), vel_fd, atol=1e-5)
    with pytest.raises(ValueError):
        hl.Composite([])


def test_evaluate_flow_rejects_folding():
    class Fold(hl.RigidRotation):
        def jacobian(self, t, x):
            lam, det = super().jacobian(t, x)
            return lam, -det

    with pytest.raises(hl.SingularFlowError):
        hl.evaluate_flow(Fold((0.0, 0.0, 1.0), 1.0), 0.5, PTS)


def test_transported_field_pulsation_closed_form():
    # omega_t(y) = Lambda omega_0(x)/J = omega_0(y/s)/s^2 for pure dilation
    fam = hl.UniformPulsation(0.3)
    t = 0.8
    s = fam.scale(t)
    omega0 = lambda p: np.stack([p[:, 1], -p[:, 0], np.full(len(p), 0.2)], axis=-1)
    state = hl.transported_field(fam, t, omega0)
    got = state.field(PTS)
    assert np.allclose(got, omega0(PTS / s) / s**2)
    # densities divide by J
    assert np.allclose(state.density(PTS), 1.0 / s**3)


def test_continuity_residual_radial_compress():
    rep = hl.continuity_residual(hl.RadialCompress(0.3, 1.2), [0.2, 0.7], PTS)
    assert rep.rel <= 1e-6
    assert rep.max_abs <= rep.rel * rep.scale * (1.0 + 1e-12)


def test_transport_pde_residual_small(tube04):
    grid = hl.build_grid(tube04.support, 0.05)
    rot = hl.transport_pde_residual(hl.RigidRotation((1.0, 0.0, 0.0), 0.7), 0.0, tube04, grid)
    pul = hl.transport_pde_residual(hl.UniformPulsation(0.3), 0.0, tube04, grid)
    assert rot <= 3e-2
    assert pul <= 3e-2
    assert rot == pytest.approx(0.01450, abs=5e-4)
    assert pul == pytest.approx(0.02448, abs=5e-4)


def test_sweep_rotation_invariants(offset_tube, offset_grid):
    fam = hl.RigidRotation((0.0, 0.0, 1.0), 0.7)
    sweep = hl.conservation_sweep(fam, offset_tube, [0.0, 0.6, 1.2], offset_grid)
    tab = sweep.table()
    assert sweep.header() == ["t", "H_bs", "E", "dEdt_formula", "dEdt_fd"]
    # pullback quadrature makes both invariants exact under an isometry
    assert np.max(np.abs(tab[:, 1] - tab[0, 1])) <= 1e-14
    assert np.max(np.abs(tab[:, 2] - tab[0, 2])) <= 1e-12 * tab[0, 2]
    assert np.max(np.abs(tab[:, 4])) <= 1e-12
    assert np.max(np.abs(tab[:, 3])) <= 3e-2 * tab[0, 2] * 0.7


def test_sweep_pulsation_tracks_dilation_law(offset_tube, offset_grid):
    fam = hl.UniformPulsation(0.3)
    times = [0.0, 0.4, 0.8, 1.2]
    tab = hl.conservation_sweep(fam, offset_tube, times, offset_grid).table()
    expect = oracles.pulsation_energy(tab[0, 2], 0.3, 1.0, times)
    assert np.max(np.abs(tab[:, 2] - expect) / expect) <= 1e-12
    rel = np.abs(tab[:, 3] - tab[:, 4]) / np.abs(tab[:, 4])
    assert np.max(rel) <= 3e-2


def test_sweep_twist_section_flux_constant(offset_tube, offset_grid):
    # Material cross-sections transport by the cofactor rule, so the flux of
    # the frozen-in field through them cannot change at all.
    frame = hl.Frame.from_axis((0.6, 0.0, 0.3), (1.0, 0.0, 0.0))
    sec = hl.cross_section(hl.AxisymTorus(frame, 1.0, 0.4))
    fam = hl.DifferentialTwist(0.8, 1.2)
    sweep = hl.conservation_sweep(
        fam, offset_tube, [0.0, 0.5, 1.0], offset_grid, sections0=[sec]
    )
    tab = sweep.table()
    assert sweep.header()[-1] == "phi_1"
    assert tab[0, 5] == pytest.approx(1.00019685, abs=1e-6)
    assert np.max(np.abs(tab[:, 5] - tab[0, 5])) == 0.0
