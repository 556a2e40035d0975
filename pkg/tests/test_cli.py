import json
import math
from pathlib import Path

import pytest

from hofbauer.cli import dispatch, load_diagram
from hofbauer.diagram import build_truncation
from hofbauer.maps import from_spec

MAPS = Path(__file__).resolve().parent.parent / "data" / "maps"
FULL = str(MAPS / "full_shift.json")
GOLDEN = str(MAPS / "golden.json")
NONMARKOV = str(MAPS / "mod1_1_10_5_2.json")
CUBIC = str(MAPS / "negbeta_cubic.json")


def run(capsys, *argv):
    code = dispatch(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_entropy(capsys):
    code, out, _ = run(capsys, "entropy", "--map", FULL, "--depth", "3")
    assert code == 0
    data = json.loads(out)
    assert data["h"] == pytest.approx(math.log(2), abs=1e-12)
    assert data["manifest"]["command"] == "entropy"
    assert data["manifest"]["number_policy"]["mode"] == "exact"


def test_gibbs_golden(capsys):
    code, out, _ = run(capsys, "gibbs", "--map", GOLDEN, "--nmax", "12")
    assert code == 0
    assert json.loads(out)["violations"] == []


def test_unknown_flag(capsys):
    code, _, err = run(capsys, "entropy", "--map", FULL, "--bogus")
    assert code == 2 and "usage" in err


def test_words_and_cylinder(capsys):
    code, out, _ = run(capsys, "words", "--map", GOLDEN, "--len", "4")
    assert code == 0
    assert len(out.split()) == 8 and out.split()[0] == "1,1,1,1"
    code, out, _ = run(capsys, "cylinder", "--map", FULL, "--word", "1,2")
    data = json.loads(out)
    assert (data["lo"], data["hi"], data["empty"]) == (0.25, 0.5, False)
    assert data["lo_exact"] == "1/4"
    code, out, _ = run(capsys, "cylinder", "--map", GOLDEN, "--word", "2,2")
    assert json.loads(out)["empty"] is True


def test_bad_symbol_is_domain_error(capsys):
    code, _, _ = run(capsys, "cylinder", "--map", FULL, "--word", "1,3")
    assert code == 1


def test_inline_map_and_missing_file(capsys):
    code, out, _ = run(capsys, "entropy", "--map", '{"type":"mod1","alpha":"0","beta":"3"}', "--depth", "2")
    assert code == 0 and json.loads(out)["h"] == pytest.approx(math.log(3))
    code, _, _ = run(capsys, "entropy", "--map", "/nonexistent.json")
    assert code == 2


def test_caps(capsys):
    assert run(capsys, "diagram", "--map", FULL, "--depth", "500")[0] == 3
    assert run(capsys, "words", "--map", FULL, "--len", "30")[0] == 3
    assert run(capsys, "diagram", "--map", FULL, "--depth", "500", "--unsafe")[0] == 0


def test_diagram_round_trip(tmp_path, capsys):
    out = tmp_path / "d.json"
    code, _, _ = run(capsys, "diagram", "--map", NONMARKOV, "--depth", "9", "--out", str(out))
    assert code == 0
    data = json.loads(out.read_text(encoding="utf-8"))
    assert set(data["vertices"][0]) >= {"id", "symbol", "lo", "hi", "level", "complete"}
    assert data["manifest"]["outputs"] == [str(out)]
    D = load_diagram(str(out))
    ref = build_truncation(from_spec(json.loads(Path(NONMARKOV).read_text())), 9)
    assert D.vertices == ref.vertices and D.arrows == ref.arrows and D.complete == ref.complete


def test_check_irreducible(capsys):
    code, out, _ = run(capsys, "check-irreducible", "--map", '{"type":"mod1","alpha":"0","beta":"3"}',
                       "--interval", "0.4,0.41", "--tau-max", "50")
    data = json.loads(out)
    assert code == 0 and data["certified"] and data["verified"] and data["tau"] <= 5


def test_mme_periodic_report(capsys):
    code, out, _ = run(capsys, "mme", "--map", GOLDEN, "--depth", "5")
    data = json.loads(out)
    assert data["pi"] == pytest.approx([0.7236068, 0.2763932], abs=1e-7)
    code, out, _ = run(capsys, "periodic", "--map", CUBIC, "--depth", "10", "--pmax", "6")
    data = json.loads(out)
    assert data["cycles"] and all(c["residual"] < 1e-12 for c in data["cycles"])
    code, out, _ = run(capsys, "report", "--map", CUBIC, "--depth", "10")
    data = json.loads(out)
    assert code == 0 and data["stable"] and data["gibbs"]["violations"] == 0


def test_ldp_requires_seed(capsys):
    assert run(capsys, "ldp", "--map", FULL, "--depth", "3", "--levels", "0.7")[0] == 2


def test_ldp_reproducible(tmp_path, capsys):
    args = ["ldp", "--map", FULL, "--depth", "3", "--observable", "sym=1", "--levels", "0.7",
            "--ns", "10:30:10", "--trials", "5000", "--seed", "7"]
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        csv_path = tmp_path / f"r{i}.csv"
        assert dispatch(args + ["--out", str(out), "--csv", str(csv_path)]) == 0
        data = json.loads(out.read_text())
        assert data["manifest"]["seed"] == 7
        data["manifest"].pop("duration_s")
        data["manifest"].pop("outputs")
        data["manifest"].pop("argv")
        outs.append((data, csv_path.read_text()))
    assert outs[0] == outs[1]
    assert outs[0][1].splitlines()[0] == "s,n,p,std_error,hits,censored"
    assert len(outs[0][1].splitlines()) == 4


def test_observable_values(capsys):
    code, out, _ = run(capsys, "ldp", "--map", FULL, "--depth", "3", "--observable", "values=1,0",
                       "--levels", "0.7", "--ns", "10,20", "--trials", "2000", "--seed", "1")
    assert code == 0
    assert json.loads(out)["rows"][0]["analytic_rate"] == pytest.approx(0.0822828785, abs=1e-8)
    code, _, _ = run(capsys, "ldp", "--map", FULL, "--depth", "3", "--observable", "values=1",
                     "--levels", "0.7", "--seed", "1")
    assert code == 2
