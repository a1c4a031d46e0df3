import csv
import io
import json
import math

import pytest

from curvmom.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_catalog_formats(capsys):
    code, out, _ = run(capsys, "catalog", "--json")
    assert code == 0
    entries = json.loads(out)
    assert {e["name"] for e in entries} == {"polar2d", "spherical", "cylindrical", "cone_chart", "torus_gn"}
    code, out, _ = run(capsys, "catalog", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 5 and rows[-1]["params"] == "R=2;r=1"
    code, out, _ = run(capsys, "catalog")
    assert code == 0 and len(out.strip().splitlines()) == 5


def test_inspect_spherical_point(capsys):
    code, out, _ = run(capsys, "inspect", "--chart", "spherical", "--at", "r=2,theta=pi/4,phi=0.1", "--json")
    assert code == 0
    info = json.loads(out)
    assert info["lame"] == pytest.approx([1.0, 2.0, math.sqrt(2.0)], rel=1e-15)
    coeff = info["canonical_coefficients"]
    assert coeff["r"] == pytest.approx(0.5, rel=1e-15)
    assert coeff["theta"] == pytest.approx(0.5, rel=1e-14)
    assert coeff["phi"] == 0.0
    s = info["slices"]
    assert s["r"]["M_avg"] == pytest.approx(-0.5, abs=1e-15)
    assert s["theta"]["M_avg"] == pytest.approx(-0.25, abs=1e-15)
    assert abs(s["phi"]["M_avg"]) < 1e-15


def test_inspect_torus_mean_curvature(capsys):
    code, out, _ = run(capsys, "inspect", "--chart", "torus_gn", "--at", "w=0,theta=1,phi=1", "--json")
    info = json.loads(out)
    assert info["slices"]["w"]["M_sum"] == pytest.approx(-1.2126921290509529466, abs=1e-12)


def test_inspect_human_and_csv(capsys):
    code, out, _ = run(capsys, "inspect", "--chart", "polar2d", "--at", "r=1,phi=0")
    assert code == 0 and "slice r" in out
    code, out, _ = run(capsys, "inspect", "--chart", "polar2d", "--at", "r=1,phi=0", "--format", "csv")
    rows = {(r["quantity"], r["slice"]): float(r["value"]) for r in csv.DictReader(io.StringIO(out))}
    assert rows[("M_sum", "r")] == pytest.approx(-1.0)


def test_singular_point_exit_2(capsys):
    code, _, err = run(capsys, "inspect", "--chart", "spherical", "--at", "r=0,theta=1,phi=1")
    assert code == 2 and "numerical error" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("inspect", "--chart", "nosuch", "--at", "r=1"),
        ("inspect", "--chart", "spherical", "--at", "r=1"),
        ("inspect", "--chart", "spherical", "--at", "r=1,theta=q,phi=0"),
        ("verify", "hermiticity", "--chart", "spherical", "--grids", "16,abc"),
        ("verify", "hermiticity", "--chart", "spherical", "--coord", "nosuch"),
        ("verify", "bogus", "--chart", "spherical"),
        ("inspect", "--file", "/nonexistent/chart.txt", "--at", "r=1"),
    ],
)
def test_input_errors_exit_3(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 3 and err


def test_bad_chart_file_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.chart"
    path.write_text("chart bad\ncoords a ; b\nembed a\nembed b + q\nend\n")
    code, _, err = run(capsys, "verify", "curvature", "--file", str(path))
    assert code == 3 and "4" in err


def test_chart_file_round_trip(tmp_path, capsys):
    path = tmp_path / "polar.chart"
    path.write_text("chart mypolar\ncoords r range 0 inf ; phi periodic 0 2*pi\nnormal r\n"
                    "embed r*cos(phi)\nembed r*sin(phi)\nend\n")
    code, out, _ = run(capsys, "verify", "gn-metric", "--file", str(path), "--json")
    assert code == 0 and json.loads(out)["chart"] == "mypolar"


def test_verify_pass_and_fail_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "hermiticity", "--chart", "spherical", "--op", "canonical",
                       "--coord", "r", "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "pass" and abs(rep["convergence_order"] - 4) <= 0.5
    # second order cannot reach the fixed tolerance on the same ladder
    code, out, _ = run(capsys, "verify", "hermiticity", "--chart", "spherical", "--op", "canonical",
                       "--coord", "r", "--order", "2", "--json")
    assert code == 1 and json.loads(out)["verdict"] == "fail"


def test_json_is_byte_identical(capsys):
    argv = ("verify", "orthogonality", "--chart", "spherical", "--normal", "r", "--at", "r=2",
            "--grids", "32,64,128", "--seed", "7", "--json")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    assert "timestamp" not in a


def test_timestamps_opt_in(capsys):
    _, out, _ = run(capsys, "verify", "gn-metric", "--chart", "torus_gn", "--json", "--timestamps")
    assert "timestamp" in json.loads(out)


def test_param_override_changes_geometry(capsys):
    _, out, _ = run(capsys, "inspect", "--chart", "torus_gn", "--param", "r=0.5", "--at",
                    "w=0,theta=pi/2,phi=0", "--json")
    # at theta = pi/2 the cos-term vanishes and M_sum = -1/r
    assert json.loads(out)["slices"]["w"]["M_sum"] == pytest.approx(-2.0, abs=1e-12)
    code, _, _ = run(capsys, "inspect", "--chart", "torus_gn", "--param", "q=1", "--at", "w=0,theta=1,phi=1")
    assert code == 3


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify", "curvature", "--chart", "cylindrical", "--json", "--out", str(target))
    assert code == 0 and out == ""
    reports = json.loads(target.read_text())
    assert all(r["verdict"] == "pass" for r in reports)


def test_verify_all_plane_chart_csv(capsys):
    code, out, _ = run(capsys, "verify", "all", "--chart", "polar2d", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows
    assert {r["check"] for r in rows} >= {"curvature", "gn-metric", "decomposition", "orthogonality", "hermiticity"}


def test_convergence_table(capsys):
    code, out, _ = run(capsys, "convergence", "hermiticity", "--chart", "spherical", "--op", "canonical",
                       "--coord", "theta")
    assert code == 0 and "fitted order" in out


def test_convergence_geometric_uses_surface_ladder(capsys):
    code, out, _ = run(capsys, "convergence", "hermiticity", "--chart", "spherical", "--op", "geometric",
                       "--normal", "r", "--json")
    rep = json.loads(out)
    assert code == 0 and [r["grid"] for r in rep["residuals"]][-1] == "256x256"
