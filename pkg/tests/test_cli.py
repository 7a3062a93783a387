import json
import subprocess
import sys

import pytest

from moduli_betti import asymptotics as asy
from moduli_betti.cli import main
from moduli_betti.moduli import betti_m0n


@pytest.fixture(autouse=True)
def _restore_precision():
    old = asy.PRECISION_BITS
    yield
    asy.set_precision(old)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compute_is_idempotent(tmp_path, capsys):
    c = str(tmp_path)
    code, out, _ = run(capsys, "compute", "--max-n", "12", "--cache-dir", c)
    assert code == 0
    assert json.loads(out)["rows"] == [{"space": "M0n", "tables": 10, "written": 10, "cached": 0}]
    before = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    code, out, _ = run(capsys, "compute", "--max-n", "12", "--cache-dir", c)
    assert json.loads(out)["rows"][0]["written"] == 0
    assert {p.name: p.read_bytes() for p in tmp_path.iterdir()} == before
    code, out, _ = run(capsys, "compute", "--max-n", "12", "--cache-dir", c, "--force")
    assert json.loads(out)["rows"][0]["written"] == 10
    assert {p.name: p.read_bytes() for p in tmp_path.iterdir()} == before


def test_compute_several_spaces(tmp_path, capsys):
    code, out, _ = run(capsys, "compute", "--max-n", "7", "--space", "FM,GIT", "--space", "Hilb",
                       "--surface", "P2,A2", "--cache-dir", str(tmp_path), "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "space,tables,written,cached"
    assert [l.split(",")[0] for l in lines[1:]] == ["FM", "GIT", "Hilb-P2", "Hilb-A2"]
    assert (tmp_path / "Hilb-A2_3.json").exists()
    assert (tmp_path / "GIT_7.json").exists() and not (tmp_path / "GIT_6.json").exists()


def test_env_var_cache_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("BETTI_CACHE_DIR", str(tmp_path / "envcache"))
    assert run(capsys, "compute", "--max-n", "6")[0] == 0
    assert (tmp_path / "envcache" / "M0n_6.json").exists()


def test_diagnose(tmp_path, capsys):
    c = str(tmp_path)
    code, _, err = run(capsys, "diagnose", "--max-n", "12", "--cache-dir", c)
    assert code == 3 and "compute" in err
    run(capsys, "compute", "--max-n", "14", "--space", "M0n,FM", "--cache-dir", c)
    code, out, _ = run(capsys, "diagnose", "--min-n", "10", "--max-n", "14", "--space", "M0n,FM",
                       "--ulc-r", "3", "--window-c", "1.0", "--cache-dir", c)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 11
    head = lines[0].split(",")
    fm12 = dict(zip(head, next(l for l in lines if l.startswith("12,FM")).split(",")))
    assert fm12["ulc_holds"] == "false" and fm12["ulc_first_violation"] == "4"
    code2, out2, _ = run(capsys, "diagnose", "--min-n", "10", "--max-n", "14", "--space", "M0n,FM",
                         "--cache-dir", c)
    assert out2 == out


def test_verify_and_corruption(tmp_path, capsys):
    c = str(tmp_path)
    run(capsys, "compute", "--max-n", "10", "--cache-dir", c)
    code, out, _ = run(capsys, "verify", "--max-n", "14", "--cache-dir", c)
    doc = json.loads(out)
    assert code == 0 and doc["ok"]
    names = [r["check"] for r in doc["rows"]]
    for needed in ("solver-agreement", "functional-residual", "psi-power-vs-product", "fm-identity",
                   "reversion-oracle", "duality", "cache"):
        assert needed in names
    p = tmp_path / "M0n_8.json"
    rec = json.loads(p.read_text())
    rec["betti"][2] = str(int(rec["betti"][2]) + 1)
    p.write_text(json.dumps(rec))
    code, out, _ = run(capsys, "verify", "--max-n", "14", "--cache-dir", c)
    assert code == 1
    bad = [r for r in json.loads(out)["rows"] if not r["ok"]]
    assert "M0n_8.json: b_2: cached 716, computed 715" in bad[0]["detail"]


def test_plot_data(tmp_path, capsys):
    c = str(tmp_path)
    code, out, _ = run(capsys, "plot-data", "-n", "50", "--cache-dir", c)
    assert code == 0 and len(out.splitlines()) == 49
    assert out.splitlines()[0] == "k,normalized_betti,gaussian_density"
    code, _, err = run(capsys, "plot-data", "--space", "GIT", "-n", "50", "--cache-dir", c)
    assert code == 2 and "even" in err
    code, out, _ = run(capsys, "plot-data", "--space", "GIT", "-n", "49", "--cache-dir", c, "--format", "json")
    assert code == 0 and len(json.loads(out)["rows"]) == 47


def test_gallery(capsys):
    code, out, _ = run(capsys, "gallery", "--max-n", "9")
    assert code == 0
    spaces = {l.split(",")[1] for l in out.splitlines()[1:]}
    assert spaces == {"Hilb", "GIT", "Flag"}


def quotient_file(tmp_path, fm_betti=(1, 2, 2, 1)):
    recs = [
        {"space": "M0n1Quot", "n": 2, "betti": ["1"]},
        {"space": "M0n1Quot", "n": 3, "betti": ["1", "1"]},
        {"space": "FMQuot", "n": 2, "betti": ["1", "1", "1"]},
        {"space": "FMQuot", "n": 3, "betti": [str(b) for b in fm_betti]},
    ]
    p = tmp_path / "quot.json"
    p.write_text(json.dumps(recs, indent=1))
    return p


def test_ingest_and_table1(tmp_path, capsys):
    cache = tmp_path / "cache"
    f = quotient_file(tmp_path)
    code, out, _ = run(capsys, "ingest-quotient", str(f), "--cache-dir", str(cache))
    assert code == 0 and json.loads(out)["ok"]
    assert (cache / "FMQuot_3.json").exists()
    code, out, _ = run(capsys, "table1", "--cache-dir", str(cache))
    assert code == 0
    # FMQuot n=3 is (1,2,2,1): variance 11/12, so 11/36 after dividing by n
    assert out.splitlines() == ["n,M0nQuot,M0n1Quot,FMQuot", "2,,0.0000000000,0.3333333333",
                                "3,,0.0833333333,0.3055555556"]
    code, out2, _ = run(capsys, "table1", str(f))
    assert out2 == out
    code, _, _ = run(capsys, "table1", str(f), "--n", "9")
    assert code == 3
    code, _, _ = run(capsys, "verify", "--max-n", "8", "--cache-dir", str(cache))
    assert code == 0


def test_ingest_mismatch_and_errors(tmp_path, capsys):
    f = quotient_file(tmp_path, (1, 3, 3, 1))
    code, _, err = run(capsys, "ingest-quotient", str(f), "--cache-dir", str(tmp_path / "c"))
    assert code == 1 and "fm-quotient" in err
    bad = tmp_path / "neg.json"
    bad.write_text('[\n{"space": "M0nQuot", "n": 5, "betti": ["1", "-1"]}\n]\n')
    code, _, err = run(capsys, "ingest-quotient", str(bad), "--cache-dir", str(tmp_path / "c"))
    assert code == 3 and "neg.json:2:" in err
    code, _, _ = run(capsys, "ingest-quotient", str(tmp_path / "missing.json"))
    assert code == 3


def test_asymptotics(capsys):
    code, out, _ = run(capsys, "asymptotics", "--max-n", "30", "--exclusion-radius", "0.1",
                       "--grid-points", "512", "--precision", "128")
    assert code == 0
    doc = json.loads(out)
    assert doc["precision_bits"] == 128 and doc["exclusion_radius"] == 0.1
    vals = {r["quantity"]: r["value"] for r in doc["rows"]}
    assert vals["M0n.var_slope"] == pytest.approx(0.06537, abs=1e-5)
    assert vals["scan.K"] > 1
    code2, out2, _ = run(capsys, "asymptotics", "--max-n", "30", "--grid-points", "512", "--precision", "128")
    assert out2 == out


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "compute", "--max-n", "0")[0] == 2
    assert run(capsys, "compute", "--space", "Nope")[0] == 2
    assert run(capsys, "asymptotics", "--precision", "16")[0] == 2
    assert run(capsys, "plot-data")[0] == 2


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "moduli_betti", "plot-data", "-n", "8", "--cache-dir", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert len(r.stdout.splitlines()) == 1 + len(betti_m0n(8).betti)
