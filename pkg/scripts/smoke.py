"""Coarse end-to-end exercise of every module; catches wiring bugs fast."""
import time

import numpy as np

import helilab as hl

t0 = time.time()


def stamp(msg):
    print(f"[{time.time() - t0:6.1f}s] {msg}", flush=True)


# geometry + tube field
circle = hl.Circle(hl.Frame.standard(), 1.0)
tube = hl.make_tube_field(circle, 0.4, 1.0)
grid = hl.build_grid(tube.support, 0.1)
stamp(f"tube grid: {grid.n_cells} cells")
ts = hl.sample(tube, grid)
div = hl.divergence(ts)
stamp(f"tube div max (depth>=2): {np.max(np.abs(div)):.3e}")

# biot-savart + curl inverse
rep = hl.verify_curl_inverse(ts)
stamp(f"tube curl-inverse residual: {rep.residual:.4f} on {rep.n_cells} cells")

# helicity three ways
h_bs = float(hl.helicity_bs(ts))
h_dbl = float(hl.helicity_double_integral(ts))
h_ph = float(hl.helicity_physical(hl.bs_sampled(ts), omega=ts))
stamp(f"tube helicity: bs={h_bs:.5f} double={h_dbl:.5f} physical={h_ph:.5f} (expect ~0)")

# writhe / link
c1 = hl.Circle(hl.Frame.standard(), 1.0).polyline(256)
f2 = hl.Frame.from_axis((1.0, 0.0, 0.0), (0.0, 1.0, 0.0))
c2 = hl.Circle(f2, 1.0).polyline(256)
lk = hl.linking_number(c1, c2)
stamp(f"hopf link = {lk:.6f}")

# harmonic torus + basis
torus = hl.AxisymTorus(hl.Frame.standard(), 2.0, 1.0)
basis = hl.build_hk_basis([torus])
stamp(f"flux closed form: {basis.fluxes[0]:.9f} (expect {2 - np.sqrt(3):.9f})")
tg = hl.build_grid(torus, 0.12)
gram = hl.gram_check(basis, [tg])
stamp(f"gram[0,0] = {gram[0, 0]:.6f} vs flux-normalized 1")

# decompose a curl-free field
h_field = basis.l_fields[0]
parts = hl.decompose_curlfree(h_field, basis, tg)
stamp(f"decompose circulations: {parts.coords.circulations}")

# spheromak
ball = hl.Ball((0.0, 0.0, 0.0), 1.0)
sph, xi = hl.make_spheromak(ball)
sg = hl.build_grid(ball, 2.0 / 24)
ss = hl.sample(sph, sg)
cs = hl.curl(ss)
el = sg.depth_mask(2)
res = np.linalg.norm(cs.values[el] - xi * ss.values[el]) / (xi * np.linalg.norm(ss.values[el]))
stamp(f"spheromak xi={xi:.6f} curl-eig residual={res:.4f}")
h_s = float(hl.helicity_bs(ss))
e_s = hl.field_energy(ss)
stamp(f"spheromak xi*H/E = {xi * h_s / e_s:.4f} (expect ~1)")

# transport: pulsation
fam = hl.UniformPulsation(0.3)
st = hl.transported_field(fam, 0.7, tube)
fs = hl.evaluate_flow(fam, 0.7, grid.centers)
stamp(f"pulsation det range: {fs.det.min():.4f}..{fs.det.max():.4f}")
pr = hl.transport_pde_residual(fam, 0.3, tube, grid)
stamp(f"pulsation transport pde residual: {pr:.3e}")

cr = hl.continuity_residual(fam, [0.2, 0.5], grid.centers[::50])
stamp(f"pulsation continuity rel residual: {cr.rel:.3e}")

# conservation sweep (tiny)
times = [0.0, 0.25, 0.5]
secs = [hl.cross_section(torus)] if False else None
sweep = hl.conservation_sweep(fam, tube, times, grid)
tab = sweep.table()
stamp(f"sweep H row0={tab[0, 1]:.5f} row2={tab[2, 1]:.5f}; E: {tab[0, 2]:.5f} -> {tab[2, 2]:.5f}")
stamp(f"sweep dEdt formula vs fd at t=0.25: {tab[1, 3]:.5f} vs {tab[1, 4]:.5f}")

# twist J=1
tw = hl.DifferentialTwist(0.8, 1.5)
fs2 = hl.evaluate_flow(tw, 0.9, grid.centers[::37])
stamp(f"twist max|J-1| = {np.max(np.abs(fs2.det - 1)):.2e}")

# rigid rotation velocity consistency
rot = hl.RigidRotation((1.0, 0.0, 0.0), 0.6)
p = np.array([[0.3, -0.2, 0.5]])
x1 = rot.map(0.4, p)
dt = 1e-6
x2 = rot.map(0.4 + dt, p)
v_fd = (x2 - x1) / dt
v = rot.velocity(0.4, x1)
stamp(f"rotation velocity fd err = {np.max(np.abs(v - v_fd)):.2e}")

# radial compress inverse round-trip
rc = hl.RadialCompress(0.3, 1.2)
y = rc.map(0.3, p)
x_back = rc.inverse(0.3, y)
stamp(f"radial compress inverse round-trip err = {np.max(np.abs(x_back - p)):.2e}")

# mhd: magnetic state on spheromak
state = hl.make_magnetic_state(ss)
stamp(f"spheromak A=BS(B) curl residual: {state.curl_residual:.4f}")
hm = hl.potential_helicity(state, gate=0.2)
stamp(f"spheromak <A|B> = {hm:.5f} vs H_bs = {h_s:.5f}")

# mhd rate wiring (torus B field, rotation u, kappa=0 -> rate 0)
bt = hl.make_tube_field(hl.Circle(hl.Frame.standard(), 2.0), 0.6, 1.0)
btg = hl.build_grid(bt.support, 0.15)
bts = hl.sample(bt, btg)
basis_t = hl.build_hk_basis([hl.AxisymTorus(hl.Frame.standard(), 2.0, 0.6)])
gauge = hl.GaugeChoice([0.4])
rate = hl.hm_rate(gauge, bt, basis_t, btg)
stamp(f"hm_rate formula = {rate.formula:.5f} (expect 0.4*flux={0.4 * hl.flux(bt, basis_t.sections[0]):.5f}), l2 = {rate.l2:.5f}")

state_t = hl.make_magnetic_state(bts, basis_t)
u_zero = lambda pts: np.zeros_like(np.atleast_2d(pts))
fd = hl.hm_rate_fd_check(state_t, u_zero, gauge, basis_t, 0.05)
stamp(f"hm_rate fd (u=0) = {fd:.5f}")

stamp("smoke done")
