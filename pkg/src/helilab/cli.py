"""Command-line front end.

Subcommands: writhe, link, bs, helicity, delta-h, hodge, conserve,
mhd-rate, spheromak-check.  Every run validates its JSON config against a
fixed schema before touching numerical code, prints a one-line summary,
and (with --out or an "output" key) writes a deterministic JSON or CSV
file: sorted keys, 17-significant-digit CSV floats, '\n' line ends, no
timestamps, and results independent of --threads.

Exit codes: 0 success, 2 configuration error, 3 numerical gate failure.
"""
from __future__ import annotations

import argparse
import copy
import json
import os
import sys

import jsonschema
import numpy as np

from . import _kernels
from .biot_savart import BSOptions, bs_field, bs_sampled
from .errors import (
    ConfigError,
    DegenerateGridError,
    HelilabError,
    IntersectingCurvesError,
    NotCurlFreeError,
    OverlapError,
    SingularFlowError,
)
from .fields import (
    GradientField,
    LinearCombination,
    SampledField,
    curl,
    field_energy,
    l2_inner,
    make_harmonic_torus_field,
    make_spheromak,
    make_tube_field,
    sample,
)
from .functionals import (
    delta_h_surface,
    delta_h_volume,
    helicity_bs,
    helicity_double_integral,
    helicity_physical,
    linking_number,
    writhe,
)
from .geometry import (
    AxisymTorus,
    Ball,
    Circle,
    Frame,
    PolylineCurve,
    UnionDomain,
    boundary_samples,
    build_grid,
    core_loop,
    cross_section,
)
from .hodge_hk import (
    build_hk_basis,
    circulation,
    delta_h_flux_circulation,
    flux,
    gram_check,
)
from .mhd import GaugeChoice, hm_rate, hm_rate_fd_check, make_magnetic_state
from .transport import (
    Composite,
    DifferentialTwist,
    RadialCompress,
    RigidRotation,
    UniformPulsation,
    conservation_sweep,
)

__all__ = ["run", "main", "CONFIG_SCHEMA"]

_VEC3 = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 3,
    "maxItems": 3,
}

_DOMAIN_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {"enum": ["ball", "torus", "union"]},
        "center": _VEC3,
        "radius": {"type": "number"},
        "origin": _VEC3,
        "axis": _VEC3,
        "ref": _VEC3,
        "major_radius": {"type": "number"},
        "minor_radius": {"type": "number"},
        "parts": {"type": "array", "items": {"$ref": "#/$defs/domain"}},
    },
    "required": ["type"],
    "additionalProperties": False,
}

_FIELD_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {
            "enum": ["tube", "harmonic_torus", "spheromak", "gradient", "combo"]
        },
        "origin": _VEC3,
        "axis": _VEC3,
        "ref": _VEC3,
        "radius": {"type": "number"},
        "tube_radius": {"type": "number"},
        "flux": {"type": "number"},
        "major_radius": {"type": "number"},
        "minor_radius": {"type": "number"},
        "center": _VEC3,
        "ball_radius": {"type": "number"},
        "amplitude": {"type": "number"},
        "linear": _VEC3,
        "quad": {"type": "array", "items": _VEC3, "minItems": 3, "maxItems": 3},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "coeff": {"type": "number"},
                    "field": {"$ref": "#/$defs/field"},
                },
                "required": ["coeff", "field"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["type"],
    "additionalProperties": False,
}

_FLOW_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {
            "enum": [
                "rigid_rotation",
                "pulsation",
                "twist",
                "radial_compress",
                "composite",
            ]
        },
        "axis": _VEC3,
        "rate": {"type": "number"},
        "amplitude": {"type": "number"},
        "frequency": {"type": "number"},
        "width": {"type": "number"},
        "stages": {"type": "array", "items": {"$ref": "#/$defs/flow"}},
    },
    "required": ["type"],
    "additionalProperties": False,
}

_CURVE_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {"enum": ["circle", "points"]},
        "origin": _VEC3,
        "axis": _VEC3,
        "ref": _VEC3,
        "radius": {"type": "number"},
        "segments": {"type": "integer", "minimum": 16},
        "points": {"type": "array", "items": _VEC3, "minItems": 3},
        "closed": {"type": "boolean"},
    },
    "required": ["type"],
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$defs": {
        "domain": _DOMAIN_SCHEMA,
        "field": _FIELD_SCHEMA,
        "flow": _FLOW_SCHEMA,
        "curve": _CURVE_SCHEMA,
    },
    "type": "object",
    "properties": {
        "domain": {"$ref": "#/$defs/domain"},
        "field": {"$ref": "#/$defs/field"},
        "field2": {"$ref": "#/$defs/field"},
        "flow": {"$ref": "#/$defs/flow"},
        "grid": {
            "type": "object",
            "properties": {
                "h": {"type": "number", "exclusiveMinimum": 0},
                "padding": {"type": "integer", "minimum": 1},
            },
            "required": ["h"],
            "additionalProperties": False,
        },
        "times": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "options": {"type": "object"},
        "output": {"type": "string"},
    },
    "additionalProperties": False,
}


def _frame_from(spec: dict) -> Frame:
    origin = spec.get("origin", (0.0, 0.0, 0.0))
    axis = spec.get("axis", (0.0, 0.0, 1.0))
    return Frame.from_axis(origin, axis, spec.get("ref"))


def _build_domain(spec: dict):
    kind = spec["type"]
    if kind == "ball":
        return Ball(spec.get("center", (0.0, 0.0, 0.0)), spec["radius"])
    if kind == "torus":
        return AxisymTorus(_frame_from(spec), spec["major_radius"], spec["minor_radius"])
    if kind == "union":
        return UnionDomain(tuple(_build_domain(p) for p in spec.get("parts", [])))
    raise ConfigError(f"unknown domain type {kind!r}")


def _build_field(spec: dict):
    kind = spec["type"]
    if kind == "tube":
        circle = Circle(_frame_from(spec), spec["radius"])
        return make_tube_field(circle, spec["tube_radius"], spec.get("flux", 1.0))
    if kind == "harmonic_torus":
        torus = AxisymTorus(_frame_from(spec), spec["major_radius"], spec["minor_radius"])
        return make_harmonic_torus_field(torus)
    if kind == "spheromak":
        ball = Ball(spec.get("center", (0.0, 0.0, 0.0)), spec["ball_radius"])
        field, _ = make_spheromak(ball, spec.get("amplitude", 1.0))
        return field
    if kind == "gradient":
        return GradientField(
            spec.get("linear", (0.0, 0.0, 0.0)),
            spec.get("quad"),
            spec.get("center", (0.0, 0.0, 0.0)),
        )
    if kind == "combo":
        return LinearCombination(
            [(t["coeff"], _build_field(t["field"])) for t in spec.get("terms", [])]
        )
    raise ConfigError(f"unknown field type {kind!r}")


def _build_flow(spec: dict):
    kind = spec["type"]
    if kind == "rigid_rotation":
        return RigidRotation(spec.get("axis", (0.0, 0.0, 1.0)), spec.get("rate", 1.0))
    if kind == "pulsation":
        return UniformPulsation(spec["amplitude"], spec.get("frequency", 1.0))
    if kind == "twist":
        return DifferentialTwist(spec.get("rate", 1.0), spec["width"])
    if kind == "radial_compress":
        return RadialCompress(spec["amplitude"], spec["width"], spec.get("frequency", 1.0))
    if kind == "composite":
        return Composite([_build_flow(s) for s in spec.get("stages", [])])
    raise ConfigError(f"unknown flow type {kind!r}")


def _build_curve(spec: dict) -> PolylineCurve:
    if spec["type"] == "circle":
        return Circle(_frame_from(spec), spec["radius"]).polyline(
            spec.get("segments", 256)
        )
    return PolylineCurve(np.asarray(spec["points"], dtype=float), spec.get("closed", True))


def _require(cfg: dict, *keys: str):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _tori_of(domain) -> list[AxisymTorus]:
    if isinstance(domain, AxisymTorus):
        return [domain]
    if isinstance(domain, UnionDomain):
        tori = [p for p in domain.parts if isinstance(p, AxisymTorus)]
        if len(tori) != len(domain.parts):
            raise ConfigError("all union parts must be tori for this command")
        return tori
    raise ConfigError("command needs a torus or a union of tori")


def _grid_for(cfg: dict, domain):
    grid_cfg = cfg.get("grid")
    if grid_cfg is None:
        raise ConfigError("missing config keys: grid")
    return build_grid(domain, grid_cfg["h"], grid_cfg.get("padding", 2))


def _cmd_writhe(cfg: dict) -> tuple[dict, str]:
    opts = cfg.get("options", {})
    if "curve" not in opts:
        raise ConfigError("options.curve is required")
    jsonschema.validate(opts["curve"], {**_CURVE_SCHEMA, "$defs": CONFIG_SCHEMA["$defs"]})
    w = writhe(_build_curve(opts["curve"]))
    return {"writhe": w}, f"writhe = {w:.6f}"


def _cmd_link(cfg: dict) -> tuple[dict, str]:
    opts = cfg.get("options", {})
    for key in ("curve1", "curve2"):
        if key not in opts:
            raise ConfigError(f"options.{key} is required")
        jsonschema.validate(opts[key], {**_CURVE_SCHEMA, "$defs": CONFIG_SCHEMA["$defs"]})
    v = linking_number(_build_curve(opts["curve1"]), _build_curve(opts["curve2"]))
    return {"link": v}, f"link = {v:.3f}"


def _cmd_bs(cfg: dict) -> tuple[dict, str]:
    _require(cfg, "domain", "field", "grid")
    opts = cfg.get("options", {})
    targets = opts.get("targets")
    if not targets:
        raise ConfigError("options.targets is required")
    domain = _build_domain(cfg["domain"])
    field = _build_field(cfg["field"])
    grid = _grid_for(cfg, domain)
    src = sample(field, grid)
    bs_opts = BSOptions(epsilon=float(opts.get("epsilon", 0.0)))
    vals = bs_field(src, np.asarray(targets, dtype=float), bs_opts)
    return (
        {"targets": targets, "values": vals, "n_source_cells": grid.n_cells},
        f"bs evaluated at {len(targets)} targets from {grid.n_cells} cells",
    )


def _cmd_helicity(cfg: dict) -> tuple[dict, str]:
    _require(cfg, "domain", "field", "grid")
    method = cfg.get("options", {}).get("method", "bs")
    if method not in ("bs", "double", "physical"):
        raise ConfigError(f"unknown helicity method {method!r}")
    domain = _build_domain(cfg["domain"])
    field = _build_field(cfg["field"])
    grid = _grid_for(cfg, domain)
    f = sample(field, grid)
    if method == "bs":
        rep = helicity_bs(f)
    elif method == "double":
        rep = helicity_double_integral(f)
    else:
        rep = helicity_physical(f)
    e = field_energy(f)
    return (
        {"helicity": rep.to_json_dict(), "energy": e},
        f"H = {rep.value:.8g} (method={rep.method})",
    )


def _cmd_delta_h(cfg: dict) -> tuple[dict, str]:
    _require(cfg, "domain", "field", "grid")
    domain = _build_domain(cfg["domain"])
    tori = _tori_of(domain)
    omega = _build_field(cfg["field"])
    opts = cfg.get("options", {})
    c = float(opts.get("harmonic_coefficient", 0.0))
    n_u, n_v = opts.get("boundary_resolution", [64, 64])
    grid = _grid_for(cfg, domain)
    basis = build_hk_basis(tori)
    omega_s = sample(omega, grid)
    b_on_grid = bs_sampled(omega_s)
    l1 = basis.l_fields[0]
    u_s = SampledField(grid, b_on_grid.values + c * l1(grid.centers))

    def u_rule(pts):
        return bs_field(omega_s, pts) + c * l1(pts)

    vol = delta_h_volume(u_s, omega_s)
    surf_val = sum(
        delta_h_surface(u_rule, omega_s, boundary_samples(t, n_u, n_v)).value
        for t in tori
    )

    def upsilon(pts):
        return u_rule(pts) - bs_field(omega_s, pts)

    fk = delta_h_flux_circulation(upsilon, omega, basis)
    return (
        {
            "volume_form": vol.to_json_dict(),
            "surface_form": surf_val,
            "flux_circulation_form": fk.to_json_dict(),
            "harmonic_coefficient": c,
        },
        f"delta_h: volume = {vol.value:.6g}, surface = {surf_val:.6g}, "
        f"flux*circ = {fk.value:.6g}",
    )


def _cmd_hodge(cfg: dict) -> tuple[dict, str]:
    _require(cfg, "domain", "grid")
    domain = _build_domain(cfg["domain"])
    tori = _tori_of(domain)
    basis = build_hk_basis(tori)
    grids = [build_grid(t, cfg["grid"]["h"], cfg["grid"].get("padding", 2)) for t in tori]
    gram = gram_check(basis, grids)
    circ = [
        [circulation(lf, lp) for lp in basis.loops] for lf in basis.l_fields
    ]
    flx = [
        [flux(ff, sec) for sec in basis.sections] for ff in basis.f_fields
    ]
    off = gram - np.diag(np.diag(gram))
    return (
        {
            "fluxes": basis.fluxes,
            "gram": gram,
            "loop_circulations": circ,
            "section_fluxes": flx,
            "gram_max_offdiag": float(np.max(np.abs(off))) if basis.n > 1 else 0.0,
        },
        f"hodge basis on {basis.n} tori; gram diag = "
        + ", ".join(f"{gram[i, i]:.6f}" for i in range(basis.n)),
    )


def _cmd_conserve(cfg: dict) -> tuple[dict, str]:
    _require(cfg, "domain", "field", "flow", "grid", "times")
    domain = _build_domain(cfg["domain"])
    omega0 = _build_field(cfg["field"])
    family = _build_flow(cfg["flow"])
    grid = _grid_for(cfg, domain)
    opts = cfg.get("options", {})
    n_u, n_v = opts.get("boundary_resolution", [48, 48])
    boundary = boundary_samples(domain, n_u, n_v) if opts.get("boundary", False) else None
    sections = None
    if opts.get("sections"):
        tori = _tori_of(domain)
        sections = [
            cross_section(tori[s.get("torus", 0)], azimuth=s.get("azimuth", 0.0))
            for s in opts["sections"]
        ]
    res = conservation_sweep(
        family, omega0, cfg["times"], grid, boundary0=boundary, sections0=sections
    )
    tab = res.table()
    h = tab[:, 1]
    drift = float(np.max(np.abs(h - h[0])) / max(abs(h[0]), 1e-300))
    return (
        {"header": res.header(), "rows": tab, "h_drift": drift},
        f"sweep over {len(res.rows)} times; H_bs drift = {drift:.3e}",
    )


def _cmd_mhd_rate(cfg: dict) -> tuple[dict, str]:
    _require(cfg, "domain", "field", "flow", "grid")
    domain = _build_domain(cfg["domain"])
    tori = _tori_of(domain)
    b_field = _build_field(cfg["field"])
    family = _build_flow(cfg["flow"])
    opts = cfg.get("options", {})
    kappa_m = np.asarray(opts.get("kappa_m", [0.0] * len(tori)), dtype=float)
    if len(kappa_m) != len(tori):
        raise ConfigError("options.kappa_m must have one entry per torus")
    dt = float(opts.get("dt", 0.05))
    t0 = float(opts.get("time", 0.0))
    grid = _grid_for(cfg, domain)
    basis = build_hk_basis(tori)
    gauge = GaugeChoice(kappa_m)
    b_s = sample(b_field, grid)
    state = make_magnetic_state(b_s, basis, offsets=None)
    rate = hm_rate(gauge, b_field, basis, grid)

    def u_eval(pts):
        return family.velocity(t0, np.atleast_2d(np.asarray(pts, dtype=float)))

    rate_fd = hm_rate_fd_check(state, u_eval, gauge, basis, dt)
    drift = hm_rate_fd_check(
        state, u_eval, GaugeChoice(np.zeros(len(tori))), basis, dt
    )
    return (
        {
            "rate_formula": rate.formula,
            "rate_l2": rate.l2,
            "rate_fd": rate_fd,
            "drift": drift,
            "fluxes": rate.fluxes,
            "kappa_m": kappa_m,
            "dt": dt,
            "curl_residual": state.curl_residual,
        },
        f"hm rate: formula = {rate.formula:.6g}, fd = {rate_fd:.6g}",
    )


def _cmd_spheromak_check(cfg: dict) -> tuple[dict, str]:
    _require(cfg, "domain", "grid")
    domain = _build_domain(cfg["domain"])
    if not isinstance(domain, Ball):
        raise ConfigError("spheromak-check needs a ball domain")
    grid = _grid_for(cfg, domain)
    field, xi = make_spheromak(domain, cfg.get("options", {}).get("amplitude", 1.0))
    f = sample(field, grid)
    c = curl(f)
    eligible = grid.depth_mask(2)
    res = float(
        np.linalg.norm(c.values[eligible] - xi * f.values[eligible])
        / (xi * np.linalg.norm(f.values[eligible]))
    )
    h = float(helicity_bs(f))
    e = field_energy(f)
    return (
        {
            "xi": xi,
            "curl_residual": res,
            "h_bs": h,
            "energy": e,
            "xi_h_over_e": xi * h / e,
        },
        f"spheromak: xi = {xi:.6f}, curl residual = {res:.3e}, xi*H/E = {xi * h / e:.4f}",
    )


_COMMANDS = {
    "writhe": _cmd_writhe,
    "link": _cmd_link,
    "bs": _cmd_bs,
    "helicity": _cmd_helicity,
    "delta-h": _cmd_delta_h,
    "hodge": _cmd_hodge,
    "conserve": _cmd_conserve,
    "mhd-rate": _cmd_mhd_rate,
    "spheromak-check": _cmd_spheromak_check,
}

_CONFIG_ERRORS = (
    ConfigError,
    OverlapError,
    DegenerateGridError,
    IntersectingCurvesError,
    ValueError,
    KeyError,
)
_GATE_ERRORS = (NotCurlFreeError, SingularFlowError)


def _format_cell(x: float) -> str:
    return f"{x:.17g}"


def _write_output(path: str, command: str, cfg: dict, results: dict):
    if command == "conserve":
        header = results["header"]
        lines = [",".join(header)]
        for row in results["rows"]:
            lines.append(",".join(_format_cell(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        payload = {
            "command": command,
            "config": _jsonable(cfg),
            "results": _jsonable(results),
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="helilab", description="helicity laboratory command line"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    default_threads = os.cpu_count() or 1
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--threads", type=int, default=default_threads)
        p.add_argument("--h", type=float, default=None, dest="h_override")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        print(f"config error: {exc.message}", file=sys.stderr)
        return 2

    cfg = copy.deepcopy(cfg)
    if args.h_override is not None:
        cfg.setdefault("grid", {})["h"] = args.h_override
    _kernels.set_threads(args.threads)

    try:
        results, summary = _COMMANDS[args.command](cfg)
    except _CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except _GATE_ERRORS as exc:
        print(f"numerical gate failure: {exc}", file=sys.stderr)
        return 3
    except HelilabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3

    print(summary)
    out_path = args.out or cfg.get("output")
    if out_path:
        _write_output(out_path, args.command, cfg, _jsonable(results))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
