import io
import json
import math
import subprocess
import sys

import pytest

from rotoray.cli import main
from rotoray.io import (InstanceError, diagram_to_json, dump_json,
                        instance_to_json, load_diagram, load_instance)
from rotoray.geom import make_ray
from rotoray.plane import build_plane_diagram


def run_cli(argv, stdin_text=""):
    proc = subprocess.run(
        [sys.executable, "-m", "rotoray.cli", *argv],
        input=stdin_text, capture_output=True, text=True, timeout=300)
    return proc


def test_instance_roundtrip(tmp_path):
    rays = [make_ray((0, 0), (1, 0)), make_ray((1, 2), (0, -1))]
    data = instance_to_json("rays", rays=rays)
    f = io.StringIO()
    dump_json(data, f)
    loaded = load_instance(io.StringIO(f.getvalue()))
    assert loaded["kind"] == "rays"
    assert loaded["rays"][0].apex == (0, 0)
    assert loaded["rays"][1].dir == pytest.approx((0, -1))


def test_instance_validation_errors():
    with pytest.raises(InstanceError):
        load_instance(io.StringIO("not json"))
    with pytest.raises(InstanceError):
        load_instance(io.StringIO('{"version": "1", "kind": "nope"}'))
    with pytest.raises(InstanceError):
        load_instance(io.StringIO('{"version": "1", "kind": "rays", "rays": []}'))


def test_polygon_normalized_ccw():
    data = {"version": "1", "kind": "polygon",
            "polygon": [[0, 0], [0, 1], [1, 0]]}  # clockwise on purpose
    inst = load_instance(io.StringIO(json.dumps(data)))
    pts = inst["polygon"]
    area2 = sum(pts[i][0] * pts[(i + 1) % 3][1] - pts[(i + 1) % 3][0] * pts[i][1]
                for i in range(3))
    assert area2 > 0


def test_diagram_roundtrip_structural():
    rays = [make_ray((0, 0), (1, 0.3)), make_ray((2, 1), (-0.4, 1))]
    d = build_plane_diagram(rays)
    data = diagram_to_json(d)
    f = io.StringIO()
    dump_json(data, f)
    text = f.getvalue()
    parsed = load_diagram(io.StringIO(text))
    f2 = io.StringIO()
    dump_json(parsed, f2)
    assert f2.getvalue() == text  # parse(emit(D)) emits identically


def test_gen_polygon_brocard_pipe():
    gen = run_cli(["gen", "--kind", "regular-ngon", "--m", "5"])
    assert gen.returncode == 0
    poly = run_cli(["polygon", "--algo", "both", "--brocard"], gen.stdout)
    assert poly.returncode == 0
    data = json.loads(poly.stdout)
    assert data["brocard"]["angle"] == pytest.approx(3 * math.pi / 10, abs=1e-9)


def test_gen_grid_plane_faces():
    gen = run_cli(["gen", "--kind", "grid", "--m", "3"])
    assert gen.returncode == 0
    plane = run_cli(["plane"], gen.stdout)
    assert plane.returncode == 0
    data = json.loads(plane.stdout)
    assert data["vertices"] and data["edges"]


def test_check_exit_codes():
    gen = run_cli(["gen", "--kind", "grid", "--m", "2"])
    chk = run_cli(["check", "--samples", "1500", "--seed", "7"], gen.stdout)
    assert chk.returncode == 0
    bad = run_cli(["plane"], "{}")
    assert bad.returncode == 2
    dup = instance_to_json("rays", rays=[make_ray((0, 0), (1, 0)),
                                         make_ray((0, 0), (0, 1))])
    r = run_cli(["plane"], json.dumps(dup))
    assert r.returncode == 3


def test_determinism_byte_identical():
    gen = run_cli(["gen", "--kind", "nonintersecting", "--m", "3"])
    a = run_cli(["plane", "--brocard"], gen.stdout)
    b = run_cli(["plane", "--brocard"], gen.stdout)
    assert a.returncode == 0 and a.stdout == b.stdout


def test_line_and_render(tmp_path):
    inst = instance_to_json("rays", rays=[make_ray((0, 1), (1, 0.5)),
                                          make_ray((3, -2), (-1, 1))])
    line = run_cli(["line", "--line", "0,1,0"], json.dumps(inst))
    assert line.returncode == 0
    env = json.loads(line.stdout)
    assert env["type"] == "envelope" and env["pieces"]
    out = tmp_path / "env.svg"
    r = run_cli(["render", "-o", str(out)], line.stdout)
    assert r.returncode == 0
    svg = out.read_text()
    assert svg.startswith("<svg") and "polyline" in svg


def test_curve_subcommand():
    rays = [make_ray((0.2, 0.1), (1, 0.4)), make_ray((-0.5, 0.3), (0, 1))]
    inst = instance_to_json("curve+rays", rays=rays)
    inst["curve"] = {"kind": "circle", "center": [0, 0], "radius": 5.0}
    r = run_cli(["curve", "--inside"], json.dumps(inst))
    assert r.returncode == 0
    env = json.loads(r.stdout)
    assert env["brocard"]["angle"] > 0


def test_render_diagram_svg(tmp_path):
    gen = run_cli(["gen", "--kind", "regular-ngon", "--m", "6"])
    poly = run_cli(["polygon", "--brocard"], gen.stdout)
    out = tmp_path / "pvd.svg"
    r = run_cli(["render", "-o", str(out)], poly.stdout)
    assert r.returncode == 0
    svg = out.read_text()
    assert "<svg" in svg and " A " in svg  # native arc commands


def test_brocard_subcommand_dispatch():
    gen = run_cli(["gen", "--kind", "regular-ngon", "--m", "4"])
    r = run_cli(["brocard"], gen.stdout)
    assert r.returncode == 0
    data = json.loads(r.stdout)
    assert data["brocard"]["angle"] == pytest.approx(math.pi / 4, abs=1e-9)
