import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from povm_uncertainty import catalog
from povm_uncertainty.cli import main
from povm_uncertainty.io import dumps, povm_to_document
from povm_uncertainty.scan import COLUMNS, format_csv, parse_csv
from povm_uncertainty.uncertainty import property_report, uncertainty_operator


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def docs(tmp_path):
    def write(name, **params):
        item = catalog.build(name, **params)
        path = tmp_path / f"{name}.json"
        path.write_text(dumps(povm_to_document(item.povm, item.values, item.meta())))
        return str(path)
    return write


def test_validate_from_stdin(capsys, monkeypatch):
    code, doc, _ = run(capsys, "catalog", "dump", "mzx", "--theta", "0.5")
    assert code == 0
    monkeypatch.setattr(sys, "stdin", io.StringIO(doc))
    code, out, _ = run(capsys, "validate", "-")
    assert code == 0
    rep = json.loads(out)
    assert rep["results"]["ok"] and rep["versions"]["schema"] == "1"


def test_validate_non_psd(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dim": 1, "labels": ["good", "neg"],
                                "elements": [[[[1.5, 0]]], [[[-0.5, 0]]]]}))
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 1
    failed = [c["name"] for c in json.loads(out)["results"]["checks"] if not c["passed"]]
    assert any("neg" in n for n in failed)


def test_validate_malformed(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "validate", str(path))
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "validate", str(tmp_path / "missing.json"))
    assert code == 2


def test_analyze_mzx(capsys, docs):
    code, out, _ = run(capsys, "analyze", docs("mzx", theta=math.pi / 4), "--values", "Z")
    assert code == 0
    dm2 = np.array(json.loads(out)["results"]["uncertainty"]["uncertainty_operator"])
    np.testing.assert_allclose(dm2[..., 0], 0.5 * np.eye(2), atol=1e-12)


def test_analyze_pvm_and_state(capsys, docs):
    code, out, _ = run(capsys, "analyze", docs("pvm-z"), "--values", "Z", "--state", '{"bloch": [1, 0, 0]}')
    assert code == 0
    res = json.loads(out)["results"]
    assert np.abs(np.array(res["uncertainty"]["uncertainty_operator"])).max() == 0
    assert res["variance"]["total"] == pytest.approx(1.0)
    code, out, _ = run(capsys, "analyze", docs("pvm-z"), "--state", "[[1, 0], [0, 0]]")
    assert json.loads(out)["results"]["variance"]["total"] == pytest.approx(0.0)


def test_analyze_trine_matches_library(capsys, docs):
    code, out, _ = run(capsys, "analyze", docs("trine"), "--values", "delta0")
    assert code == 0
    vp = catalog.trine().valued("delta0")
    lib = {"uncertainty": uncertainty_operator(vp).to_dict(), "properties": property_report(vp).to_dict()}
    assert dumps(json.loads(out)["results"]) == dumps(lib)


def test_analyze_errors(capsys, docs):
    code, _, err = run(capsys, "analyze", docs("pvm-z"), "--values", "nope")
    assert code == 1 and "nope" in err
    code, _, _ = run(capsys, "analyze", docs("pvm-z"), "--state", "[[1, 0], [0, 0], [0, 0]]")
    assert code == 1
    code, _, _ = run(capsys, "analyze", docs("pvm-z"), "--state", "[[1, 0")
    assert code == 2


def test_entropy_bounds(capsys, docs):
    tet = docs("tetrahedron")
    code, out, _ = run(capsys, "entropy", tet, "--bound", "hm1")
    assert code == 0
    assert json.loads(out)["results"]["bound"]["value_bits"] == pytest.approx(math.log2(4 / 3), abs=1e-9)
    code, out, _ = run(capsys, "entropy", tet, "--bound", "single", "--convention", "2", "--starts", "8")
    rep = json.loads(out)
    assert rep["results"]["bound"]["value_bits"] == pytest.approx(1.0, abs=1e-6)
    assert rep["results"]["bound"]["other_convention_bits"] == pytest.approx(0.5, abs=1e-6)
    assert rep["settings"] == {"convention": 2, "seed": 0, "starts": 8, "tol": 1e-9}
    code, out, _ = run(capsys, "entropy", docs("pvm-z"), "--bound", "hm1")
    assert json.loads(out)["results"]["bound"]["value_bits"] == 0.0


def test_entropy_pairs(capsys, docs):
    z, x = docs("pvm-z"), docs("pvm-x")
    code, out, _ = run(capsys, "entropy", z, "--bound", "mixture", "--with", x)
    assert json.loads(out)["results"]["bound"]["value_bits"] == pytest.approx(1.5)
    code, out, _ = run(capsys, "entropy", z, "--bound", "pair", "--with", x, "--convention", "1")
    assert json.loads(out)["results"]["bound"]["value_bits"] == pytest.approx(0.5)
    code, _, err = run(capsys, "entropy", z, "--bound", "pair")
    assert code == 1 and "--with" in err
    code, _, err = run(capsys, "entropy", docs("mzx", theta=0.3), "--bound", "mixture", "--with", x)
    assert code == 1 and "PVM" in err


def test_entropy_minimize_states(capsys, docs):
    code, out, _ = run(capsys, "entropy", docs("mzx", theta=0.0), "--bound", "hm1", "--minimize-states",
                       "--starts", "4")
    assert json.loads(out)["results"]["min_entropy"]["value_bits"] == pytest.approx(1.0, abs=1e-6)


def test_naimark_reports(capsys, docs):
    code, out, _ = run(capsys, "naimark", docs("trine"))
    res = json.loads(out)["results"]
    assert res["ext_dim"] == 3
    assert res["orthonormality_residual"] <= 1e-10 and res["restriction_residual"] <= 1e-10
    code, out, _ = run(capsys, "naimark", docs("pvm-z"))
    assert json.loads(out)["results"]["ext_dim"] == 2
    code, out, _ = run(capsys, "naimark", docs("tetrahedron"))
    align = json.loads(out)["results"]["reference_alignment"]
    assert align["catalog_entry"] == "tetrahedron" and align["residual"] <= 1e-10


def test_catalog_commands(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert "tetrahedron" in [e["name"] for e in json.loads(out)["results"]["entries"]]
    code, out, _ = run(capsys, "catalog", "dump", "pvm-z")
    els = np.array(json.loads(out)["elements"])[..., 0]
    np.testing.assert_array_equal(els, [np.diag([1, 0]), np.diag([0, 1])])
    assert run(capsys, "catalog", "dump", "mzx")[0] == 1
    assert run(capsys, "catalog", "dump", "bogus")[0] == 1
    assert run(capsys, "catalog", "dump")[0] == 1


def test_scan_csv(capsys, tmp_path):
    csv_path = tmp_path / "scan.csv"
    args = ["scan", "--from", "0", "--to", "0.7853981633974483", "--steps", "3", "--starts", "6",
            "--csv", str(csv_path)]
    code, out, _ = run(capsys, *args)
    assert code == 0
    text = csv_path.read_bytes()
    rows = parse_csv(text.decode())
    assert [r["theta"] for r in rows] == pytest.approx([0, math.pi / 8, math.pi / 4])
    assert rows[0]["mixture_bound_bits"] == pytest.approx(1.0) and rows[0]["min_entropy_bits"] == pytest.approx(1.0)
    assert rows[-1]["mixture_bound_bits"] == pytest.approx(1.5)
    assert rows[-1]["min_entropy_bits"] == pytest.approx(1.5, abs=1e-6)
    for r in rows:
        assert r["min_entropy_bits"] >= r["mixture_bound_bits"] - 1e-6
    assert format_csv(rows).encode() == text
    assert text.decode().splitlines()[0] == ",".join(COLUMNS)
    code, out2, _ = run(capsys, *args)
    assert out2 == out and csv_path.read_bytes() == text


def test_scan_errors(capsys):
    assert run(capsys, "scan", "--family", "nope")[0] == 1
    assert run(capsys, "scan", "--param", "phi")[0] == 1


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "povm_uncertainty", "catalog", "list"], capture_output=True,
                         text=True, check=True)
    assert "tetrahedron" in out.stdout
