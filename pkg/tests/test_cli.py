import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from s3deform import cli, family_search
from s3deform.config import RunConfig, load_config

ROOT = Path(__file__).resolve().parents[1]
SCHEMA = json.loads((ROOT / "docs" / "report_schema.json").read_text())


def run_json(capsys, *argv):
    code = cli.main(["--format", "json", *argv])
    doc = json.loads(capsys.readouterr().out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["exit_code"] == code
    return code, doc


def run_text(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_schema_copies_identical():
    packaged = ROOT / "src" / "s3deform" / "report_schema.json"
    assert packaged.read_text() == (ROOT / "docs" / "report_schema.json").read_text()
    jsonschema.Draft202012Validator.check_schema(SCHEMA)


def test_classify_flagship(capsys):
    code, doc = run_json(capsys, "classify", "0", "7", "-12", "--p", "5")
    assert code == 0
    res = doc["result"]
    assert res["verdict"] == "degenerate" and res["degeneracy_index"] == 1
    code, text, _ = run_text(capsys, "classify", "0", "7", "-12", "--p", "5")
    assert code == 0
    assert "degenerate" in text and str(res["local"]["hensel_root"]["residue"]) in text
    assert "1733 + 266x + 196x^2" in text


def test_classify_generic(capsys):
    code, doc = run_json(capsys, "classify", "0", "1", "1", "--p", "31")
    assert code == 0 and doc["result"]["verdict"] == "generic"


def test_classify_reducible_is_structural_error(capsys):
    code, doc = run_json(capsys, "classify", "0", "0", "-1", "--p", "5")
    assert code == cli.EXIT_ERROR
    assert doc["result"]["failure"]["error"] == "Reducible"
    code, text, _ = run_text(capsys, "classify", "0", "0", "-1", "--p", "5")
    assert code == cli.EXIT_ERROR and "Reducible" in text


def test_not_neat_exits_zero(capsys):
    code, doc = run_json(capsys, "classify", "-29", "4", "-1", "--p", "5")
    assert code == 0 and doc["result"]["verdict"] == "not neat"


def test_search_negative_range_forms(capsys):
    code, doc = run_json(capsys, "search", "--range", "-1:12")
    assert code == 0
    assert [a for a, _ in doc["result"]["primes"]] == [-1, 1, 2, 4, 7, 10, 11]
    code2, doc2 = run_json(capsys, "search", "--range=-1:12")
    assert doc2["result"] == doc["result"]
    code, text, _ = run_text(capsys, "search", "--range", "-1:12")
    assert "a=11 p=5351" in text


def test_search_alarm_exit(capsys, monkeypatch):
    def fake(lo, hi, **kw):
        s = family_search.ScanSummary(lo, hi)
        s.add(family_search.LedgerRecord(1, 31, family_search.NONGENERIC, 1, "t"))
        return s

    monkeypatch.setattr(family_search, "scan_family_range", fake)
    code, doc = run_json(capsys, "search", "--range", "1:1")
    assert code == cli.EXIT_FAIL and doc["result"]["alarm"]
    code, text, _ = run_text(capsys, "search", "--range", "1:1")
    assert code == cli.EXIT_FAIL and "ALARM" in text


def test_search_ledger_and_env_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("S3DEFORM_LEDGER_DIR", str(tmp_path / "led"))
    code, doc = run_json(capsys, "search", "--range", "-1:50")
    ledger = Path(doc["result"]["ledger"])
    assert ledger.parent == tmp_path / "led" and ledger.exists()
    # rerunning without --resume is refused, with --resume it is a no-op
    code, doc = run_json(capsys, "search", "--range", "-1:50")
    assert code == cli.EXIT_ERROR and doc["error"]["type"] == "FileExistsError"
    code, doc = run_json(capsys, "search", "--range", "-1:50", "--resume")
    assert code == 0 and doc["result"]["records"] == 52


def test_deform_verify(capsys):
    code, doc = run_json(capsys, "deform-verify", "--p", "5", "--N", "6", "--D", "6")
    assert code == 0 and doc["result"]["passed"]
    code, text, _ = run_text(capsys, "deform-verify", "--p", "5", "--N", "6", "--D", "6", "--variant", "two-parameter")
    assert code == 0 and "FAIL" not in text


def test_deform_verify_failure_exit(capsys, monkeypatch):
    from s3deform import deformation as dfm

    real = dfm.universal_deformation

    def broken(p, N, D, variant="as-printed"):
        images = real(p, N, D, variant)
        v = images["v"]
        images["v"] = dfm.Mat2(v.a, v.b, dfm.TruncSeries.var(p, N, D, 3) * (-2), v.d)
        return images

    monkeypatch.setattr(dfm, "universal_deformation", broken)
    code, doc = run_json(capsys, "deform-verify", "--p", "5", "--N", "4", "--D", "4")
    assert code == cli.EXIT_FAIL and not doc["result"]["passed"]


def test_loci_eval(capsys):
    code, doc = run_json(capsys, "loci-eval", "--p", "5", "--point", "0", "10/3", "0")
    assert code == 0
    loci = doc["result"]["loci"]
    assert loci["ordinary"]["member"] and loci["inertially_reducible"]["member"]
    code, text, _ = run_text(capsys, "loci-eval", "--p", "5", "--point", "0", "10/3", "0")
    assert "ordinary: yes" in text
    code, doc = run_json(capsys, "loci-eval", "--p", "5", "--point", "1", "5", "5")
    assert code == cli.EXIT_ERROR


def test_s3mod_check(capsys):
    code, doc = run_json(capsys, "s3mod-check", "--p", "5", "--j", "2", "--i", "1")
    assert code == 0
    assert doc["result"]["triple"] == [5]
    assert all(v == [5] for v in doc["result"]["pairs"].values())
    code, doc = run_json(capsys, "s3mod-check", "--p", "7", "--j", "2", "--i", "3")
    assert code == 0 and doc["result"]["inertia"]["passed"]
    code, text, _ = run_text(capsys, "s3mod-check", "--p", "5", "--j", "2", "--i", "1")
    assert "Z/5" in text


def test_high_index(capsys):
    code, doc = run_json(capsys, "high-index", "--p", "5", "--n", "2")
    assert code == 0
    assert {"r": -29, "s": 4}.items() <= doc["result"]["candidates"][0].items()


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"N": 3, "D": 3, "format": "json"}))
    code = cli.main(["--config", str(cfg), "deform-verify", "--p", "7"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 0 and (doc["result"]["N"], doc["result"]["D"]) == (3, 3)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": 1}))
    with pytest.raises(ValueError):
        load_config(bad)
    with pytest.raises(ValueError):
        RunConfig(N=0)
    with pytest.raises(ValueError):
        RunConfig(format="xml")


def test_entry_point_subprocess():
    out = subprocess.run([sys.executable, "-m", "s3deform.cli", "--format", "json", "s3mod-check",
                          "--p", "5", "--j", "1", "--i", "1"], capture_output=True, text=True, check=False)
    assert out.returncode == 0, out.stderr
    jsonschema.validate(json.loads(out.stdout), SCHEMA)
