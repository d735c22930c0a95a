import json
import subprocess
import sys

import pytest

from strata.cli import main
from support import FIXTURES


def fx(name):
    return str(FIXTURES / name)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_enumerate_circle(capsys):
    code, out, _ = run(["enumerate", "-i", fx("s1_coordinate.json")], capsys)
    rep = json.loads(out)
    assert code == 0
    assert len(rep["cells"]) == 8 and rep["euler_characteristic"] == 0
    assert rep["stars"]["0+"] == ["0+", "++", "-+"]


def test_enumerate_sphere_with_plot(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, _, _ = run(["enumerate", "-i", fx("s2_coordinate.json"), "--plot", "-o", str(target)], capsys)
    rep = json.loads(target.read_text())
    assert code == 0 and len(rep["cells"]) == 26 and rep["euler_characteristic"] == 2
    patches = rep["plot"]["patches"]
    assert len(patches) == 8
    # each octant triangle fan has one triangle per boundary ray
    assert all(len(p["triangles"]) == 6 for p in patches)


def test_plot_arcs_on_circle(capsys):
    _, out, _ = run(["enumerate", "-i", fx("s1_diagonal.json"), "--plot"], capsys)
    plot = json.loads(out)["plot"]
    assert len(plot["points"]) == 6 and len(plot["arcs"]) == 6
    assert all(len(a["ends"]) == 2 for a in plot["arcs"])


def test_bad_inputs(capsys, tmp_path):
    code, _, err = run(["enumerate", "-i", fx("bad_rational.json")], capsys)
    assert code == 2 and "$.normals[1][0]" in err and "1/0" in err
    code, _, err = run(["enumerate", "-i", fx("malformed.json")], capsys)
    assert code == 2 and "line 3 column 1" in err
    code, _, err = run(["enumerate", "-i", str(tmp_path / "missing.json")], capsys)
    assert code == 2
    bad = tmp_path / "nonessential.json"
    bad.write_text('{"m": 2, "normals": [["1", "0"]]}')
    code, _, err = run(["verify", "-i", str(bad)], capsys)
    assert code == 2 and "essential" in err


def test_negative_depth_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["verify", "-i", fx("s0.json"), "-d", "-1"])
    assert info.value.code == 2


@pytest.mark.parametrize(
    "args,dims",
    [
        (["-i", "s0.json", "-s", "sheaf_constant_r1.json", "-f", "framework_s0.json"], [1, 1]),
        (["-i", "s1_coordinate.json", "-s", "sheaf_constant_r1.json", "-f", "framework_orthant.json"], [1, 1]),
        (["-i", "s1_coordinate.json", "-s", "sheaf_monodromy2.json", "-f", "framework_orthant.json"], [0, 0]),
    ],
)
def test_verify_passes(capsys, args, dims):
    argv = ["verify"] + [fx(a) if a.endswith(".json") else a for a in args]
    code, out, _ = run(argv, capsys)
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert [rep["main_theorem"]["dim_intuitive"], rep["main_theorem"]["dim_cokernel"]] == dims


def test_verify_arrangement_only(capsys):
    code, out, _ = run(["verify", "-i", fx("s2_coordinate.json")], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["complex"]["unaugmented_top_homology"] == 1


def test_corrupted_fixture_fails_located(capsys):
    code, out, err = run(["verify", "-i", fx("s1_corrupted.json")], capsys)
    assert code == 1
    assert "d∘d != 0 at AtM, degree -2: entry (++, X)" in err
    assert json.loads(out)["complex"]["d_squared"] is False


def test_boundary_round_trip(capsys):
    base = ["boundary", "-f", fx("framework_s0.json"), "-s", fx("sheaf_constant_r1.json")]
    code, out, _ = run(base + ["-w", fx("wedge_upper.json")], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["b"] == ["1"] and rep["round_trip"]
    code, out, _ = run(base + ["-w", fx("wedge_zero.json")], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["b"] == ["0"] and rep["round_trip"]


def test_boundary_needs_depth(capsys):
    base = ["boundary", "-f", fx("framework_two_frames.json"), "-s", fx("sheaf_constant_r1.json"),
            "-w", fx("wedge_thin.json")]
    code, _, err = run(base + ["-d", "0"], capsys)
    assert code == 1 and "no top-cell star" in err
    code, out, _ = run(base + ["-d", "1"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["refined"] and rep["round_trip"]


def test_reports_are_byte_stable():
    argv = [sys.executable, "-m", "strata", "--seed-order", "verify", "-i", fx("s1_coordinate.json"),
            "-s", fx("sheaf_constant_r1.json"), "-f", fx("framework_two_frames.json")]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and first
