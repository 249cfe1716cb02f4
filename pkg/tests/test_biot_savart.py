import numpy as np
import pytest

import helilab as hl
import oracles
from helilab import _kernels


def _fd_curl(field_at, points, step=1e-3):
    """Second-order central-difference curl of a pointwise evaluator."""
    points = np.asarray(points, dtype=float)
    jac = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = step
        jac.append((field_at(points + e) - field_at(points - e)) / (2.0 * step))
    jx, jy, jz = jac
    out = np.empty_like(points)
    out[:, 0] = jy[:, 2] - jz[:, 1]
    out[:, 1] = jz[:, 0] - jx[:, 2]
    out[:, 2] = jx[:, 1] - jy[:, 0]
    return out


def test_zero_source_maps_to_zero(tube02_sample):
    zero = hl.SampledField(tube02_sample.grid, np.zeros_like(tube02_sample.values))
    targets = np.array([[0.2, 0.1, 0.4], [1.5, 0.0, 0.0]])
    assert np.all(hl.bs_field(zero, targets) == 0.0)
    assert np.all(hl.vector_potential(zero, targets) == 0.0)


def test_onaxis_tube_value(tube02_sample):
    # Field at the loop center.  Thin-tube limit is flux/(2 R) = 0.5; the
    # finite eps=0.2 cross-section shifts the quadrature oracle to 0.498687
    # and the h=0.05 grid sum lands at 0.497340.
    out = hl.bs_field(tube02_sample, np.array([[0.0, 0.0, 0.0]]))[0]
    assert abs(out[0]) <= 1e-12 and abs(out[1]) <= 1e-12
    assert abs(out[2] - 0.497340) <= 1e-4
    oracle = oracles.tube_onaxis_field(1.0, 0.2, 1.0)
    assert abs(out[2] - oracle) / oracle <= 1e-2


def test_epsilon_smoothing_shrinks_peak(tube02_sample):
    target = np.array([[0.0, 0.0, 0.0]])
    sharp = hl.bs_field(tube02_sample, target)[0, 2]
    soft = hl.bs_field(tube02_sample, target, hl.BSOptions(epsilon=0.01))[0, 2]
    assert 0.0 < soft < sharp
    assert sharp - soft <= 1e-3


def test_rotation_equivariance():
    # BS commutes with rigid rotation; a quarter turn about z maps the grid
    # lattice onto itself so the two sums agree to round-off.
    base = hl.make_tube_field(
        hl.Circle(hl.Frame.from_axis((0.0, 0.0, 0.0), (1.0, 0.0, 0.0)), 1.0), 0.2, 1.0
    )
    rot = hl.make_tube_field(
        hl.Circle(hl.Frame.from_axis((0.0, 0.0, 0.0), (0.0, 1.0, 0.0)), 1.0), 0.2, 1.0
    )
    targets = np.array([[0.3, 0.2, 0.1], [1.1, -0.4, 0.2], [0.0, 0.9, -0.3]])
    out0 = hl.bs_field(hl.sample(base, hl.build_grid(base.support, 0.1)), targets)
    outr = hl.bs_field(
        hl.sample(rot, hl.build_grid(rot.support, 0.1)),
        oracles.rotate_90z(targets),
    )
    assert np.max(np.abs(outr - oracles.rotate_90z(out0))) <= 1e-12


def test_source_linearity():
    tube = hl.make_tube_field(hl.Circle(hl.Frame.standard(), 1.0), 0.3, 1.0)
    grid = hl.build_grid(tube.support, 0.12)
    f1 = hl.sample(tube, grid)
    f2 = hl.sample(
        lambda p: np.stack([p[:, 1], -0.5 * p[:, 0], p[:, 2] ** 2], axis=-1), grid
    )
    combo = hl.SampledField(grid, 1.3 * f1.values - 0.7 * f2.values)
    targets = np.array([[0.2, 0.1, 0.4], [1.5, 0.0, 0.0]])
    direct = hl.bs_field(combo, targets)
    split = 1.3 * hl.bs_field(f1, targets) - 0.7 * hl.bs_field(f2, targets)
    assert np.max(np.abs(direct - split)) <= 1e-12


def test_vector_potential_scaling(tube02_sample):
    targets = np.array([[0.2, 0.1, 0.4], [1.5, 0.0, 0.0]])
    one = hl.vector_potential(tube02_sample, targets)
    two = hl.vector_potential(
        hl.SampledField(tube02_sample.grid, 2.0 * tube02_sample.values), targets
    )
    assert np.max(np.abs(two - 2.0 * one)) == 0.0


def test_curl_of_potential_matches_bs():
    # curl P(V) = BS(V) away from the support; checked by central differences
    # at interior probe points.
    tube = hl.make_tube_field(hl.Circle(hl.Frame.standard(), 1.0), 0.3, 1.0)
    grid = hl.build_grid(tube.support, 0.06)
    s = hl.sample(tube, grid)
    probes = grid.centers[grid.depth_mask(2)][::50]
    fd = _fd_curl(lambda p: hl.vector_potential(s, p), probes)
    direct = hl.bs_field(s, probes)
    rel = np.linalg.norm(fd - direct) / np.linalg.norm(direct)
    assert rel <= 1e-4


def test_curl_inverse_residual_tube():
    tube = hl.make_tube_field(hl.Circle(hl.Frame.standard(), 1.0), 0.5, 1.0)
    grid = hl.build_grid(tube.support, 3.0 / 32.0)
    rep = hl.verify_curl_inverse(hl.sample(tube, grid))
    assert rep.residual <= 5e-2
    assert abs(rep.residual - 0.0363) <= 1e-3
    assert rep.n_cells > 0 and rep.h == pytest.approx(3.0 / 32.0)


def test_curl_inverse_rejects_vanishing_source(tube02_sample):
    zero = hl.SampledField(tube02_sample.grid, np.zeros_like(tube02_sample.values))
    with pytest.raises(ValueError):
        hl.verify_curl_inverse(zero)


def test_amperian_loops(tube02_sample):
    bs_at = lambda p: hl.bs_field(tube02_sample, p)
    # Meridian loop encircling the tube material at (1,0,0): encloses the
    # full unit flux.
    mer = hl.Circle(hl.Frame.from_axis((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)), 0.3)
    v_mer = hl.loop_integral(bs_at, mer.polyline(256))
    assert abs(v_mer - 1.0) <= 2e-2
    assert abs(v_mer - 0.99627) <= 1e-4
    # A circle of radius 0.5 about the z-axis is coplanar and concentric
    # with the unit core circle: the two curves are unlinked, so the
    # circulation vanishes.
    hole = hl.Circle(hl.Frame.standard(), 0.5)
    assert abs(hl.loop_integral(bs_at, hole.polyline(256))) <= 2e-3
    far = hl.Circle(hl.Frame.from_axis((5.0, 0.0, 0.0), (0.0, 0.0, 1.0)), 0.4)
    assert abs(hl.loop_integral(bs_at, far.polyline(256))) <= 1e-3


def test_loop_integral_of_constant_field_vanishes():
    square = hl.PolylineCurve(
        np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], dtype=float)
    )
    const = lambda p: np.tile(np.array([0.3, -0.1, 0.2]), (len(p), 1))
    assert abs(hl.loop_integral(const, square)) <= 1e-12


def test_bs_output_is_solenoidal(tube04_sample):
    b = hl.bs_sampled(tube04_sample)
    div = hl.divergence(b)
    scale = np.max(np.linalg.norm(b.values, axis=1)) / 0.4
    assert np.max(np.abs(div)) <= 2e-2 * scale


def test_grid_weights_uniform(tube02_sample):
    from helilab.biot_savart import grid_weights

    w = grid_weights(tube02_sample.grid)
    assert w.shape == (tube02_sample.grid.n_cells,)
    assert np.all(w == tube02_sample.grid.h**3)


def test_deterministic_across_repeats_and_threads(tube02_sample):
    import numba

    targets = np.array([[0.0, 0.0, 0.5], [0.7, -0.2, 0.1]])
    a = hl.bs_field(tube02_sample, targets)
    b = hl.bs_field(tube02_sample, targets)
    assert a.tobytes() == b.tobytes()
    prev = numba.get_num_threads()
    _kernels.set_threads(1)
    try:
        c = hl.bs_field(tube02_sample, targets)
    finally:
        _kernels.set_threads(prev)
    assert a.tobytes() == c.tobytes()
