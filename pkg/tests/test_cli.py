import json
import math
import subprocess
import sys

import numpy as np
import pytest
import yaml

from kairon.cli import main

FAST = {"quadrature": {"sphere": 32, "s_steps": 400, "loop_steps": 1000, "t_steps": 400}, "random": {"samples": 50, "mc_samples": 20000, "points": 20}}


def write_cfg(tmp_path, name="c.yaml", **cfg):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(cfg))
    return str(p)


def read_csv(path):
    lines = open(path).read().splitlines()
    assert lines[0].startswith("# kairon")
    header = lines[1].split(",")
    rows = np.array([[float(x) for x in ln.split(",")] for ln in lines[2:]])
    return lines[0], header, rows


def test_verify_default_m1_passes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["verify", "--m", "1", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["pass"] and rep["summary"]["failed"] == 0
    assert all(r["anchor"] and r["pass"] for r in rep["records"])
    assert rep["summary"]["total"] == len(rep["records"])


def test_verify_impossible_tolerance_exits_1(tmp_path):
    cfg = write_cfg(tmp_path, m=2, tolerances={"all": 1e-30}, **FAST)
    out = tmp_path / "r.json"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 1
    assert not json.loads(out.read_text())["pass"]


def test_verify_light_speed_worldline_exits_2(tmp_path, capsys):
    cfg = write_cfg(tmp_path, m=2, worldline={"kind": "straight_line", "velocity": [1.0, 0.0]})
    assert main(["verify", "--config", cfg]) == 2
    assert "class T" in capsys.readouterr().err


def test_verify_is_deterministic_and_thread_independent(tmp_path):
    cfg = write_cfg(tmp_path, m=2, **FAST)
    a, b, c = (tmp_path / f"{k}.json" for k in "abc")
    for path, threads in ((a, "1"), (b, "1"), (c, "4")):
        assert main(["verify", "--config", cfg, "--out", str(path), "--threads", threads]) == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_seed_override_changes_report(tmp_path):
    cfg = write_cfg(tmp_path, m=1, **FAST)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["verify", "--config", cfg, "--out", str(a)])
    main(["verify", "--config", cfg, "--out", str(b), "--seed", "7"])
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert rb["seed"] == 7 and ra["config_sha256"] != rb["config_sha256"]


def test_tolerance_scale(tmp_path):
    cfg = write_cfg(tmp_path, m=1, **FAST)
    out = tmp_path / "r.json"
    assert main(["verify", "--config", cfg, "--out", str(out), "--tolerance-scale", "1e-40"]) == 1
    assert main(["verify", "--config", cfg, "--tolerance-scale", "0"]) == 2


@pytest.mark.parametrize("argv", [[], ["bogus"], ["verify", "--threads", "0"], ["verify", "--m", "5"]])
def test_usage_errors_exit_2(argv):
    assert main(argv) == 2


def test_missing_config_exits_2(tmp_path):
    assert main(["verify", "--config", str(tmp_path / "nope.yaml")]) == 2


def test_propagate_zero_data(tmp_path):
    cfg = write_cfg(tmp_path, m=2, initial_data={"expression": "0"}, snapshot={"grid": [[-1, 1, 5], [-1, 1, 5]]})
    out = tmp_path / "p.csv"
    assert main(["propagate", "--config", cfg, "--out", str(out)]) == 0
    _, header, rows = read_csv(out)
    assert header == ["x0", "x1", "x2", "psi_w0"]
    assert rows.shape == (25, 4) and np.all(rows[:, 3] == 0)


def test_propagate_slab_geometry(tmp_path):
    w = [0.6, 0.8]
    cfg = write_cfg(
        tmp_path,
        m=2,
        initial_data={"expression": "bump(t)"},
        worldline={"kind": "time_axis"},
        snapshot={"x0": 0.0, "grid": [[-3, 3, 61], [-3, 3, 61]], "directions": [w]},
    )
    out = tmp_path / "p.csv"
    assert main(["propagate", "--config", cfg, "--out", str(out)]) == 0
    comment, _, rows = read_csv(out)
    assert "config_sha256=" in comment
    tau = np.abs(rows[:, 1:3] @ np.array(w))
    assert np.all(rows[tau < 0.99, 3] > 0) and np.all(rows[tau >= 1.0, 3] == 0)


def test_propagate_1p1_null_lines(tmp_path):
    cfg = write_cfg(
        tmp_path,
        m=1,
        initial_data={"expression": "bump(t)"},
        worldline={"kind": "time_axis"},
        snapshot={"x0": 2.0, "grid": [[-5, 5, 201]], "mode": "intensity"},
    )
    out = tmp_path / "p.csv"
    assert main(["propagate", "--config", cfg, "--out", str(out)]) == 0
    _, header, rows = read_csv(out)
    assert header[-1] == "intensity"
    x1 = rows[:, 1]
    # two pulses moving at light speed: centred on x1 = +-2 at time 2
    near = (np.abs(np.abs(x1) - 2.0) < 0.99)
    assert np.all(rows[near, 2] > 0) and np.all(rows[np.abs(np.abs(x1) - 2.0) >= 1.0, 2] == 0)


def test_propagate_csv_roundtrips_doubles(tmp_path):
    cfg = write_cfg(tmp_path, m=1, initial_data={"expression": "exp(-t^2)/3", "support": None}, worldline={"kind": "time_axis"}, snapshot={"grid": [[-1, 1, 7]]})
    out = tmp_path / "p.csv"
    main(["propagate", "--config", cfg, "--out", str(out)])
    _, _, rows = read_csv(out)
    assert np.array_equal(rows[:, 2], np.exp(-((rows[:, 0] + rows[:, 1]) ** 2)) / 3)


def test_propagate_invalid_grid_exits_2(tmp_path):
    cfg = write_cfg(tmp_path, m=2, snapshot={"grid": [[-1, 1, 0], [-1, 1, 3]]})
    assert main(["propagate", "--config", cfg]) == 2


def test_inner_product_gaussian_m3(tmp_path):
    cfg = write_cfg(
        tmp_path,
        m=3,
        initial_data={"expression": "exp(-t^2)", "support": None},
        worldlines=[{"kind": "time_axis"}],
        inner_product={"s_window": [-10, 10]},
        quadrature={"sphere": 16},
    )
    out = tmp_path / "ip.json"
    assert main(["inner-product", "--config", cfg, "--out", str(out)]) == 0
    val = json.loads(out.read_text())["worldlines"][0]["value"]
    assert val == pytest.approx(4 * math.pi * math.sqrt(math.pi / 2), rel=1e-6)


def test_inner_product_two_paths(tmp_path):
    cfg = write_cfg(tmp_path, m=2, worldlines=[{"kind": "time_axis"}, {"kind": "straight_line", "velocity": [0.5, 0.0]}, {"kind": "wiggly"}], quadrature={"sphere": 128})
    out = tmp_path / "ip.json"
    assert main(["inner-product", "--config", cfg, "--out", str(out)]) == 0
    res = json.loads(out.read_text())
    assert len(res["pairwise"]) == 3 and res["max_relative_defect"] <= 1e-6


def test_inner_product_empty_list_exits_2(tmp_path):
    assert main(["inner-product", "--config", write_cfg(tmp_path, m=2, worldlines=[])]) == 2


def test_inner_product_noncompact_multipath_exits_2(tmp_path, capsys):
    cfg = write_cfg(tmp_path, m=2, initial_data={"expression": "exp(-t^2)", "support": None}, inner_product={"s_window": [-10, 10]})
    assert main(["inner-product", "--config", cfg]) == 2
    assert "compact" in capsys.readouterr().err


def test_transform_identity_chain(tmp_path):
    cfg = write_cfg(tmp_path, m=2, transforms=[], quadrature={"sphere": 64})
    out = tmp_path / "t.json"
    assert main(["transform", "--config", cfg, "--out", str(out)]) == 0
    res = json.loads(out.read_text())
    assert res["defect"] <= 1e-14 and res["inverse_roundtrip_max_diff"] == 0.0


def test_transform_default_chain_m3(tmp_path):
    out, snap = tmp_path / "t.json", tmp_path / "s.csv"
    cfg = write_cfg(tmp_path, m=3, quadrature={"sphere": 24, "t_steps": 1000}, snapshot={"grid": [[-2, 2, 5]] * 3})
    assert main(["transform", "--config", cfg, "--out", str(out), "--snapshot", str(snap)]) == 0
    res = json.loads(out.read_text())
    assert res["chain_length"] == 3
    assert res["defect"] <= 1e-6
    assert res["inverse_roundtrip_max_diff"] <= 1e-10
    comment, header, rows = read_csv(snap)
    assert "transformed_state=1" in comment and rows.shape == (125, 5)


def test_transform_invalid_parameters_exit_2(tmp_path):
    cfg = write_cfg(tmp_path, m=2, transforms=[{"boost": {"direction": [1, 0], "rapidity": "fast"}}])
    assert main(["transform", "--config", cfg]) == 2


def test_module_entry_point(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run([sys.executable, "-m", "kairon", "verify", "--m", "1", "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["pass"]
