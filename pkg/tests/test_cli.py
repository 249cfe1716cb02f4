import json
import subprocess
import sys

import numpy as np
import pytest

import helilab as hl
from helilab import cli


def write_cfg(path, cfg):
    path.write_text(json.dumps(cfg))
    return str(path)


def hopf_link_cfg(out=None):
    cfg = {
        "options": {
            "curve1": {"type": "circle", "radius": 1.0, "segments": 256},
            "curve2": {
                "type": "circle",
                "origin": [1, 0, 0],
                "axis": [0, 1, 0],
                "radius": 1.0,
                "segments": 256,
            },
        }
    }
    if out is not None:
        cfg["output"] = str(out)
    return cfg


def bs_center_cfg(out):
    return {
        "domain": {"type": "torus", "major_radius": 1.0, "minor_radius": 0.2},
        "field": {"type": "tube", "radius": 1.0, "tube_radius": 0.2, "flux": 1.0},
        "grid": {"h": 0.05},
        "options": {"targets": [[0.0, 0.0, 0.0]]},
        "output": str(out),
    }


def test_link_command(tmp_path, capsys):
    out = tmp_path / "link.json"
    rc = cli.run(["link", "--config", write_cfg(tmp_path / "c.json", hopf_link_cfg(out))])
    assert rc == 0
    assert "link = 1.000" in capsys.readouterr().out
    payload = json.loads(out.read_text())
    assert payload["command"] == "link"
    assert payload["results"]["link"] == pytest.approx(1.000100407, abs=1e-9)


def test_writhe_command(tmp_path, capsys):
    cfg = {
        "options": {"curve": {"type": "circle", "radius": 1.0, "segments": 128}},
        "output": str(tmp_path / "w.json"),
    }
    rc = cli.run(["writhe", "--config", write_cfg(tmp_path / "c.json", cfg)])
    assert rc == 0
    assert json.loads((tmp_path / "w.json").read_text())["results"]["writhe"] == 0.0


def test_bs_command_and_determinism(tmp_path):
    cfg_path = write_cfg(tmp_path / "c.json", bs_center_cfg(tmp_path / "bs.json"))
    assert cli.run(["bs", "--config", cfg_path]) == 0
    first = (tmp_path / "bs.json").read_bytes()
    payload = json.loads(first)
    assert payload["results"]["n_source_cells"] == 6400
    assert payload["results"]["values"][0][2] == pytest.approx(0.497340071, abs=1e-8)
    # same bytes on a repeat run and under a different worker count
    assert cli.run(["bs", "--config", cfg_path, "--threads", "1"]) == 0
    assert (tmp_path / "bs.json").read_bytes() == first
    assert cli.run(["bs", "--config", cfg_path, "--threads", "4"]) == 0
    assert (tmp_path / "bs.json").read_bytes() == first


def test_h_override_flag(tmp_path):
    cfg_path = write_cfg(tmp_path / "c.json", bs_center_cfg(tmp_path / "bs.json"))
    assert cli.run(["bs", "--config", cfg_path, "--h", "0.12"]) == 0
    payload = json.loads((tmp_path / "bs.json").read_text())
    assert payload["results"]["n_source_cells"] == 472
    assert payload["config"]["grid"]["h"] == 0.12


def test_conserve_csv_format(tmp_path):
    out = tmp_path / "sweep.csv"
    cfg = {
        "domain": {
            "type": "torus",
            "origin": [0.6, 0.0, 0.3],
            "axis": [1, 0, 0],
            "major_radius": 1.0,
            "minor_radius": 0.4,
        },
        "field": {
            "type": "tube",
            "origin": [0.6, 0.0, 0.3],
            "axis": [1, 0, 0],
            "radius": 1.0,
            "tube_radius": 0.4,
            "flux": 1.0,
        },
        "flow": {"type": "twist", "rate": 0.8, "width": 1.2},
        "grid": {"h": 0.15},
        "times": [0.0, 0.5, 1.0],
        "options": {"sections": [{"torus": 0}]},
        "output": str(out),
    }
    cfg_path = write_cfg(tmp_path / "c.json", cfg)
    assert cli.run(["conserve", "--config", cfg_path]) == 0
    text = out.read_text()
    lines = text.splitlines()
    assert lines[0] == "t,H_bs,E,dEdt_formula,dEdt_fd,phi_1"
    assert len(lines) == 4 and text.endswith("\n")
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    # transported-section flux never moves
    assert np.all(rows[:, 5] == rows[0, 5])
    first = out.read_bytes()
    assert cli.run(["conserve", "--config", cfg_path, "--threads", "2"]) == 0
    assert out.read_bytes() == first


def test_spheromak_check_command(tmp_path):
    out = tmp_path / "sph.json"
    cfg = {
        "domain": {"type": "ball", "radius": 1.0},
        "grid": {"h": 0.125},
        "output": str(out),
    }
    assert cli.run(["spheromak-check", "--config", write_cfg(tmp_path / "c.json", cfg)]) == 0
    res = json.loads(out.read_text())["results"]
    assert set(res) == {"xi", "curl_residual", "h_bs", "energy", "xi_h_over_e"}
    assert res["xi"] == pytest.approx(4.493409, abs=1e-5)


def test_helicity_methods_agree_via_cli(tmp_path):
    base = {
        "domain": {"type": "ball", "radius": 1.0},
        "field": {"type": "spheromak", "ball_radius": 1.0},
        "grid": {"h": 0.15},
    }
    values = {}
    for method in ("bs", "double"):
        out = tmp_path / f"{method}.json"
        cfg = {**base, "options": {"method": method}, "output": str(out)}
        assert cli.run(["helicity", "--config", write_cfg(tmp_path / "c.json", cfg)]) == 0
        values[method] = json.loads(out.read_text())["results"]["helicity"]["value"]
    assert values["bs"] == pytest.approx(values["double"], rel=1e-12)


def test_missing_config_file():
    assert cli.run(["link", "--config", "/nonexistent/cfg.json"]) == 2


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert cli.run(["link", "--config", str(p)]) == 2


def test_schema_rejects_unknown_keys(tmp_path):
    assert cli.run(["link", "--config", write_cfg(tmp_path / "c.json", {"bogus": 1})]) == 2


def test_missing_required_options(tmp_path):
    cfg = {
        "domain": {"type": "ball", "radius": 1.0},
        "field": {"type": "spheromak", "ball_radius": 1.0},
        "grid": {"h": 0.2},
    }
    assert cli.run(["bs", "--config", write_cfg(tmp_path / "c.json", cfg)]) == 2


def test_invalid_geometry_is_config_error(tmp_path):
    # tube_radius >= circle radius trips the field constructor
    cfg = bs_center_cfg(tmp_path / "bs.json")
    cfg["field"]["tube_radius"] = 1.5
    assert cli.run(["bs", "--config", write_cfg(tmp_path / "c.json", cfg)]) == 2


def test_unknown_command(tmp_path):
    assert cli.run(["frobnicate", "--config", str(tmp_path / "c.json")]) == 2


def test_gate_failure_maps_to_exit_3(tmp_path, monkeypatch):
    def boom(cfg):
        raise hl.NotCurlFreeError("synthetic gate trip")

    monkeypatch.setitem(cli._COMMANDS, "link", boom)
    rc = cli.run(["link", "--config", write_cfg(tmp_path / "c.json", hopf_link_cfg())])
    assert rc == 3


def test_console_script_entry(tmp_path):
    cfg_path = write_cfg(tmp_path / "c.json", hopf_link_cfg())
    proc = subprocess.run(
        [sys.executable, "-m", "helilab.cli", "link", "--config", cfg_path],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "link = 1.000" in proc.stdout
