import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from zigzag.cli import main
from zigzag.crystalline import ZigZagVerdict
from zigzag.sweep import COLUMNS, SweepConfig, render_rows, run_sweep

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "name, argv",
    [
        ("classify_worked", ["classify", "crystalline", "--p", "5", "--k", "104", "--ap", "505"]),
        ("classify_semistable_p7", ["classify", "semistable", "--p", "7", "--k0", "5", "--L", "5/2 + 1/7"]),
        ("classify_base_weight", ["classify", "crystalline", "--p", "5", "--k", "3", "--ap", "s"]),
        ("verify_worked", ["family", "verify", "--family", "5;4;[5,5]", "--format", "json"]),
    ],
)
def test_golden_outputs(capsys, name, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / f"{name}.json").read_text()


def test_classify_json_fields(capsys):
    _, out, _ = run(capsys, "classify", "crystalline", "--p", "5", "--k", "104", "--ap", "505")
    for fragment in ('"case":"point"', '"i":0', '"rep":"mu(4)*w^2 + mu(4)*w^1"', '"tau":"2"', '"t":"2"'):
        assert fragment in out
    d = json.loads(out)
    assert ZigZagVerdict.from_dict(d).to_dict() == d


def test_exit_codes(capsys):
    code, _, err = run(capsys, "classify", "crystalline", "--p", "5", "--k", "104", "--ap", "5+")
    assert code == 2 and "parse error" in err
    code, _, err = run(capsys, "classify", "crystalline", "--p", "5", "--k", "105", "--ap", "505")
    assert code == 3 and "WeightCongruenceViolation" in err
    code, _, err = run(capsys, "classify", "crystalline", "--p", "5", "--k", "104", "--ap", "505",
                       "--capped", "--precision", "2")
    assert code == 4 and "lower bound 2" in err
    code, _, _ = run(capsys, "family", "verify", "--family", "5;4;[5")
    assert code == 2
    with pytest.raises(SystemExit) as info:
        main(["classify", "crystalline", "--p", "5"])
    assert info.value.code == 2


def test_text_and_csv_classify(capsys):
    _, out, _ = run(capsys, "classify", "semistable", "--p", "5", "--k0", "4", "--L", "2", "--format", "text")
    assert "rep" in out and "mu(4)*w^2 + mu(4)*w^1" in out
    _, out, _ = run(capsys, "classify", "semistable", "--p", "5", "--k0", "4", "--L", "2", "--format", "csv")
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["nu"] == "0" and row["lambda"] == "4"


def test_worked_family_verify_table(capsys):
    code, out, _ = run(capsys, "family", "verify", "--family", "5;4;[5,5]", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 5
    assert {r["residual"] for r in rows} == {"0"}
    assert {r["inertia_match"] for r in rows} == {r["full_match"] for r in rows} == {"true"}


def test_empty_sweep_is_header_only(capsys):
    code, out, _ = run(capsys, "sweep", "--format", "csv")
    assert code == 0
    assert out.strip() == ",".join(COLUMNS)


def test_seeded_sweep_is_byte_identical(tmp_path, capsys):
    argv = ["sweep", "--count", "6", "--primes", "5,7", "--seed", "11", "--format", "csv", "--m", "2-3"]
    outs = []
    for extra in ([], ["--jobs", "2"], []):
        path = tmp_path / f"out{len(outs)}.csv"
        assert main(argv + extra + ["--out", str(path)]) == 0
        outs.append(path.read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1] == outs[2]
    assert outs[0].count(b"\r\n") == 1 + 6 * 2


def test_config_file(tmp_path, capsys):
    conf = tmp_path / "sweep.conf"
    conf.write_text("primes = 5\ncount = 2\nseed = 3\nm = 2-2\nformat = json\nno_chart = true\n"
                    "family =\n  5;4;[5,5]\n")
    code, out, _ = run(capsys, "sweep", "--config", str(conf))
    data = json.loads(out)
    assert code == 0
    assert data["rows"][0]["family"] == "5;4;[5,5]"
    assert data["summary"]["rows"] == 3
    assert {r["gap"] for r in data["rows"]} == {""}
    # flags override the file
    code, out, _ = run(capsys, "sweep", "--config", str(conf), "--format", "csv")
    assert out.startswith("family,")


def test_family_limit_and_chart(capsys):
    code, out, _ = run(capsys, "family", "limit", "--family", "5;4;[5,5]", "--format", "json")
    assert code == 0 and json.loads(out)["a"] == "50"
    code, out, _ = run(capsys, "family", "chart", "--family", "5;4;[5,5]", "--k", "104", "--format", "json")
    assert code == 0 and json.loads(out)[0]["defect"].startswith("0 + O(5^")


def test_hard_failure_sets_exit_code(monkeypatch, capsys):
    import zigzag.cli as cli

    def fake_run(cfg):
        return [dict({c: "" for c in COLUMNS}, status="fail")]

    monkeypatch.setattr(cli, "run_sweep", fake_run)
    code, out, _ = run(capsys, "sweep", "--count", "1")
    assert code == 1 and "fail=1" in out


def test_render_formats_agree():
    rows = run_sweep(SweepConfig(count=2, seed=5, m_range=(2, 2), chart=False))
    text = render_rows(rows, "text")
    assert text.splitlines()[-1].startswith("rows=2")
    assert json.loads(render_rows(rows, "json"))["rows"] == rows
    assert list(csv.DictReader(io.StringIO(render_rows(rows, "csv")))) == rows


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "zigzag", "classify", "crystalline", "--p", "5", "--k", "104",
                           "--ap", "505"], capture_output=True, text=True, check=True)
    assert proc.stdout == (GOLDEN / "classify_worked.json").read_text()
