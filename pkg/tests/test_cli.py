import json
import subprocess
import sys

import pytest

from qfint.cli import main, parse_duration, parse_int_list
from qfint.geometry import read_point_set


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_helpers():
    assert parse_int_list("1-3,5") == [1, 2, 3, 5]
    assert parse_duration("10m") == 600
    assert parse_duration("2h") == 7200
    assert parse_duration("30s") == 30
    assert parse_duration(None) is None


def test_field(capsys):
    code, out, _ = run(capsys, "field", "--q", "3^3:2,1,1,1")
    assert code == 0 and "27" in out


def test_counts_csv(capsys):
    code, out, _ = run(capsys, "counts", "--m", "1-3", "--q", "3,5", "--cross-check")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("m,q,S,Z,N,D")
    assert "3,5,60,25,40,84,closed" in lines


def test_srg(capsys):
    code, out, _ = run(capsys, "srg", "--m", "2", "--q", "5")
    assert code == 0 and "25,16,9,12" in out
    code, out, _ = run(capsys, "srg", "--m", "4", "--q", "3", "--brute")
    assert code == 0


def test_neighbors(capsys):
    code, out, _ = run(capsys, "neighbors", "--m", "3", "--q", "5")
    assert code == 0 and ": 59" in out and "PASS" in out
    code, out, _ = run(capsys, "neighbors", "--m", "3", "--q", "5", "--v", "(1,2,0)")
    assert "conjectured 53" in out


def test_witness(capsys):
    code, out, _ = run(capsys, "witness", "--q", "5", "--m", "2", "--u", "(1,0)", "--v", "(0,1)")
    assert code == 0 and "0,4;1,0" in out and "VERIFIED" in out
    code, _, err = run(capsys, "witness", "--q", "5", "--m", "2", "--u", "(1,0)", "--v", "(1,1)")
    assert code == 2 and "error" in err


def test_clique_record(capsys):
    code, out, _ = run(capsys, "clique", "--m", "3", "--q", "7", "--deterministic")
    assert code == 0
    assert out == ("3 7 8 optimal - (0,0,0) (1,0,0) (0,1,0) (1,1,0) (4,2,6) (2,4,6) (6,4,6) (4,6,6)\n")


def test_clique_prescribed_and_export(capsys, tmp_path):
    path = tmp_path / "g.col"
    code, out, _ = run(capsys, "clique", "--m", "3", "--q", "3", "--prescribe", "(0,0,0);(1,0,0)",
                       "--export-dimacs", str(path), "--deterministic")
    assert code == 0 and out.split()[2] == "4"
    assert "p edge 27" in path.read_text()
    code, _, err = run(capsys, "clique", "--m", "3", "--q", "3", "--prescribe", "(0,0,0);(1,1,0)")
    assert code == 2


def test_clique_timeout_exit_code(capsys):
    code, out, _ = run(capsys, "clique", "--m", "3", "--q", "19", "--time-limit", "0.1s", "--deterministic")
    assert code == 3 and "lower_bound" in out


def test_json_record(capsys):
    code, out, _ = run(capsys, "clique", "--m", "3", "--q", "3", "--json", "--deterministic")
    rec = json.loads(out)
    assert rec["result"]["size"] == 4
    assert code == 0


def test_json_identical_across_workers(capsys):
    outs = []
    for w in ("1", "2"):
        run(capsys, "clique", "--m", "4", "--q", "3", "--json", "--deterministic", "--workers", w)
    for w in ("1", "2"):
        _, out, _ = run(capsys, "clique", "--m", "4", "--q", "3", "--json", "--deterministic", "--workers", w)
        outs.append(out)
    assert outs[0] == outs[1]


def test_itable(capsys):
    code, out, _ = run(capsys, "itable", "3:3,5,7", "--deterministic", "--csv")
    assert code == 0
    assert out.splitlines()[1:] == ["3,3,4,optimal,4,true", "3,5,25,formula_certified,25,true",
                                    "3,7,8,optimal,8,true"]


def test_construct_and_verify(capsys, tmp_path):
    path = tmp_path / "c.txt"
    code, out, _ = run(capsys, "construct", "circle_plus_line", "--q", "11", "--out", str(path))
    assert code == 0
    f, m, pts = read_point_set(path)
    assert f.q == 11 and m == 3 and len(pts) == 11
    code, out, _ = run(capsys, "verify-pointset", str(path))
    assert code == 0 and out.startswith("PASS")
    path.write_text("q=3 m=2\n(0,0)\n(1,1)\n")
    code, out, _ = run(capsys, "verify-pointset", str(path))
    assert code == 1 and out.startswith("FAIL")
    code, _, _ = run(capsys, "construct", "hyperplane_q1mod4", "--q", "7")
    assert code == 2


def test_export_dimacs(capsys, tmp_path):
    path = tmp_path / "g.col"
    code, out, _ = run(capsys, "export-dimacs", "--m", "2", "--q", "3", "--out", str(path))
    assert code == 0 and "9 vertices and 18 edges" in out


def test_verify_groups(capsys):
    code, out, _ = run(capsys, "verify", "groups", "--deterministic")
    assert code == 0 and "FAIL" not in out


def test_verify_constructions_reports_f27(capsys):
    code, out, _ = run(capsys, "verify", "constructions", "--qmax", "27", "--deterministic")
    fails = [ln for ln in out.splitlines() if ln.startswith("FAIL")]
    assert code == 1 and len(fails) == 1 and "27" in fails[0]


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["clique", "--m", "3"])
    assert exc.value.code == 2
    code, _, _ = run(capsys, "clique", "--m", "3", "--q", "6")
    assert code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qfint", "clique", "--m", "3", "--q", "3", "--deterministic"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout == "3 3 4 optimal - (0,0,0) (1,0,0) (2,1,1) (2,1,2)\n"
