import csv
import io
import json

import pytest

from tachyonqft import __version__
from tachyonqft.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _csv_rows(text):
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def test_figure2_tachyon_rows(capsys):
    code, out, _ = run(capsys, "figure2", "--m0sq", "-1", "--m1sq", "1", "--grid", "-10:10:200", "--format", "csv")
    assert code == 0
    rows = _csv_rows(out)
    assert len(rows) == 200
    assert all(float(r["imI"]) != 0 for r in rows)
    assert list(rows[0]) == ["p2", "reI", "imI", "reI_err", "imI_err", "method_agreement"]
    header = json.loads(out.splitlines()[0][2:])
    assert header["version"] == __version__ and header["config"]["m0sq"] == -1.0


def test_commutators_phi1_report(capsys):
    code, out, _ = run(capsys, "commutators", "--variant", "phi1")
    assert code == 0
    rep = json.loads(out)
    names = {c["name"]: c["passed"] for c in rep["checks"]}
    assert names["smeared field CCR fails: 0 != i delta"]
    assert names["twin ladder commutators vanish (star1)"]
    assert all(abs(r["im"]) < 1e-10 for r in rep["rows"])


def test_pole_scan_below_threshold(capsys):
    code, out, _ = run(capsys, "pole-scan", "--p", "0.4", "--mphi", "1")
    assert code == 0
    assert json.loads(out)["rows"] == []


def test_pole_scan_values(capsys):
    code, out, _ = run(capsys, "pole-scan")
    rows = json.loads(out)["rows"]
    assert [(r["channel"], r["cos_theta"]) for r in rows] == [("t", 0.5), ("u", -0.5)]


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "figure2", "--bogus", "1")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"m0sq": 1, "zzz": 2}))
    assert run(capsys, "figure2", "--config", str(cfg))[0] == 2
    cfg.write_text("[1, 2]")
    assert run(capsys, "figure2", "--config", str(cfg))[0] == 2
    assert run(capsys, "figure2", "--grid", "1:2")[0] == 2
    assert run(capsys, "boost-check", "--u", "1.5,0,0")[0] == 2
    assert run(capsys, "commutators", "--variant", "phi9")[0] == 2


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"m0sq": 1.0, "grid": "-2:2:5"}))
    code, out, _ = run(capsys, "figure2", "--config", str(cfg))
    assert code == 0
    rep = json.loads(out)
    assert rep["config"]["m0sq"] == 1.0 and len(rep["rows"]) == 5


def test_failed_claim_exit_1(capsys):
    # short times: the packet has not reached its asymptotic decay yet
    code, out, err = run(capsys, "wavepacket", "--w", "0.1", "--t-min", "50", "--t-max", "550")
    assert code == 1
    assert "FAIL" in err
    assert json.loads(out)["status"] == "fail"


def test_nonconvergence_exit_1(capsys):
    code, out, _ = run(capsys, "commutators", "--variant", "phi2", "--points", "2:2")
    assert code == 1
    rep = json.loads(out)
    assert rep["summary"]["diagnostics"]["r"] == 2.0


def test_output_file_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "figure2", "--format", "csv", "--output", str(a), "--grid", "-3:3:7")[0] == 0
    assert run(capsys, "figure2", "--format", "csv", "--output", str(b), "--grid", "-3:3:7")[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_all_rejects_parameters(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"m0sq": 1.0}))
    assert run(capsys, "all", "--config", str(cfg))[0] == 2
