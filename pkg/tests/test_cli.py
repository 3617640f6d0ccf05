import json

import pytest

from kunzwalk import cli
from kunzwalk.nilsemigroup import dumps
from kunzwalk.walk import InfeasibleAtomSet, InvariantViolation


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_walk_writes_json_and_svg(capsys, tmp_path):
    out = tmp_path / "f20.json"
    code, _, err = run(capsys, "walk", "--m", "20", "--atoms", "6,11", "--out", str(out))
    assert code == 0 and "3 chambers" in err
    data = json.loads(out.read_text())
    assert len(data["chambers"]) == 3
    svg = (tmp_path / "f20.svg").read_text()
    assert "(7,0)∼(0,2)" in svg


def test_walk_output_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "walk", "--m", "13", "--atoms", "1,2,9", "--out", str(a))
    run(capsys, "walk", "--m", "13", "--atoms", "1,2,9", "--seed", "5", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert a.with_suffix(".svg").read_bytes() == b.with_suffix(".svg").read_bytes()


def test_walk_all_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "walk-all", "--m", "9", "--k", "2", "--out-dir", str(tmp_path),
                       "--verify", "oracle")
    assert code == 0 and "PASS oracle" in out
    lines = (tmp_path / "summary.csv").read_text().splitlines()
    assert lines[0] == "atoms,chambers,max_facets,max_eta,infeasible_flag"
    assert (tmp_path / "facet_histogram.svg").exists()


def test_analyze(capsys, tmp_path, n_not_kunz, n_13_53_15_35):
    p = tmp_path / "n.json"
    p.write_text(dumps(n_not_kunz))
    code, out, _ = run(capsys, "analyze", str(p))
    assert code == 0 and "not Kunz" in out
    p.write_text(dumps(n_13_53_15_35))
    code, out, _ = run(capsys, "analyze", str(p), "--json")
    report = json.loads(out)
    assert report["kunz"] and report["eta"] == 6


def test_apery(capsys):
    code, out, _ = run(capsys, "apery", "--gens", "13,53,15,35")
    assert code == 0
    assert "Ap = {0,53,15,68,30,70,45,85,60,35,75,50,90}" in out and "eta = 6" in out


def test_lights(capsys):
    code, out, _ = run(capsys, "lights", "--m", "20", "--atoms", "6,11", "--x", "2,7")
    assert code == 0
    assert json.loads(out)["nilsemigroup"]["factorizations"]["2"] == [[0, 2], [7, 0]]


def test_ed3(capsys):
    code, out, _ = run(capsys, "ed3", "--vee", "2,2,3,4")
    assert code == 0 and "m = 20, p1 = 3, p2 = 18" in out
    code, out, _ = run(capsys, "ed3", "--vee", "2,2,2,2")
    assert code == 0 and "no filling" in out
    code, out, _ = run(capsys, "ed3", "--m", "20")
    assert out.splitlines()[0] == "m,atoms,shape,filling,rays"


def test_cup(capsys):
    code, out, _ = run(capsys, "cup", "--d", "4", "--rays", "--check")
    assert code == 0 and "rays: 8" in out and "PASS cube transform" in out


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--m", "13", "--atoms", "1,2,9")
    assert code == 0 and "FAIL" not in out and "PASS" in out


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "walk", "--m", "12", "--atoms", "2,4")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"m": 5}')
    assert run(capsys, "analyze", str(bad))[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["walk", "--m", "x"])
    assert exc.value.code == 2


@pytest.mark.parametrize("error,code", [(InfeasibleAtomSet, 3), (InvariantViolation, 4)])
def test_failure_exit_codes(capsys, monkeypatch, error, code):
    def boom(*args, **kwargs):
        raise error("forced")
    monkeypatch.setattr(cli, "walk", boom)
    assert run(capsys, "walk", "--m", "7", "--atoms", "1,2")[0] == code
