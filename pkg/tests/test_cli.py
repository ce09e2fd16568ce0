import csv
import io
import json
import math

import pytest

from wilson_lab.cli import main
from wilson_lab.errors import ConfigError
from wilson_lab.records import RunRecord, append_jsonl, check_schema, csv_text, fmt, read_jsonl

FAST = ["--kappa", "2", "--ax", "0.2", "--t", "0.2", "--samples", "40", "--w-nodes", "16"]


def run_cli(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse rejects malformed values itself
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_algebra_command(capsys):
    code, out, _ = run_cli(capsys, "algebra", "--group", "su", "--n", "3")
    assert code == 0
    assert len(out.strip().splitlines()) >= 2


def test_area_command(capsys):
    code, out, _ = run_cli(capsys, "area", "--ax", "3", "--ay", "4", "--t", "1")
    assert code == 0
    assert float(rows_of(out)[0]["area"]) == pytest.approx(5.0, abs=1e-12)


def test_nu_norm_sweep(capsys):
    code, out, _ = run_cli(capsys, "nu-norm", "--ax", "1", "--t", "1", "--kappa", "16,32,64")
    rows = rows_of(out)
    assert code == 0 and len(rows) == 3
    vals = [float(r["nu_norm_kernel"]) for r in rows]
    assert vals[0] < vals[1] < vals[2] < 0.25


def test_potential_command(capsys):
    code, out, _ = run_cli(capsys, "potential", "--group", "su", "--n", "3", "--r", "0,1,2,3")
    rows = rows_of(out)
    assert code == 0
    assert float(rows[-1]["V"]) == pytest.approx(1.0, abs=1e-14)


def test_wilson_csv_columns_and_determinism(capsys, tmp_path):
    code, out1, _ = run_cli(capsys, "wilson", *FAST, "--seed", "3")
    _, out2, _ = run_cli(capsys, "wilson", *FAST, "--seed", "3")
    assert code == 0 and out1 == out2
    header = out1.splitlines()[0].split(",")
    assert header[:6] == ["kappa", "estimate", "std_error", "paper_closed_form", "oracle", "area"]
    _, out3, _ = run_cli(capsys, "wilson", *FAST, "--seed", "4")
    assert out3 != out1


def test_sweep_rows_follow_kappa(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--kappa", "1,2", "--ax", "0.2", "--t", "0.2",
                           "--samples", "20", "--w-nodes", "8")
    assert code == 0
    assert [float(r["kappa"]) for r in rows_of(out)] == [1.0, 2.0]


@pytest.mark.parametrize("argv", [
    ["wilson", "--kappa", "4,2"],
    ["wilson", "--kappa", "-1"],
    ["wilson", "--ax", "0", "--ay", "0", "--az", "0"],
    ["wilson", "--t", "0"],
    ["wilson", "--samples", "1"],
    ["potential", "--r", "-1"],
    ["wilson", "--degree", "x"],
])
def test_config_errors_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2 and "error" in err


def test_tail_bound_exits_3_with_hint(capsys):
    code, _, err = run_cli(capsys, "wilson", "--kappa", "16", "--ax", "2", "--t", "2", "--degree", "5",
                           "--samples", "10", "--w-nodes", "4")
    assert code == 3
    assert "feasible combination" in err


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small surface\nax = 3\nay = 4\nt = 2\n")
    _, out, _ = run_cli(capsys, "area", "--config", str(cfg))
    assert float(rows_of(out)[0]["area"]) == pytest.approx(10.0)
    _, out, _ = run_cli(capsys, "area", "--config", str(cfg), "--t", "1")
    assert float(rows_of(out)[0]["area"]) == pytest.approx(5.0)
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    code, _, err = run_cli(capsys, "area", "--config", str(bad))
    assert code == 2 and "unknown key" in err


def test_out_and_csv_files(capsys, tmp_path):
    log, table = tmp_path / "runs.jsonl", tmp_path / "t.csv"
    for _ in range(2):
        assert main(["potential", "--out", str(log), "--csv", str(table)]) == 0
    capsys.readouterr()
    recs = read_jsonl(str(log))
    assert len(recs) == 2 and recs[0]["command"] == "potential"
    assert recs[0]["schema_version"] == "1.0"
    assert rows_of(table.read_text())[1]["R"] == "1"


def test_jsonl_stdout(capsys):
    code, out, _ = run_cli(capsys, "area", "--format", "jsonl")
    rec = json.loads(out)
    assert code == 0 and rec["results"][0]["area"] == pytest.approx(0.25)


def test_schema_major_version_rejected(tmp_path):
    check_schema("1.7")
    for v in ("2.0", "0.9", "x"):
        with pytest.raises(ConfigError):
            check_schema(v)
    p = tmp_path / "r.jsonl"
    append_jsonl(str(p), RunRecord("area", {}, [], schema_version="2.0"))
    with pytest.raises(ConfigError):
        read_jsonl(str(p))


def test_number_formatting_round_trips():
    for x in (0.1, 1 / 3, 1.9920516877325634, -2.5e-300, 12345678.123456789):
        assert float(fmt(x)) == x
    assert fmt(None) == "" and fmt(3) == "3" and fmt(True) == "true"
    assert csv_text([{"a": 1.0, "b": None}]) == "a,b\n1,\n"


def test_records_encode_complex_and_nonfinite():
    rec = RunRecord("x", {"z": 1 + 2j}, [{"v": math.inf}])
    d = json.loads(rec.to_json())
    assert d["config"]["z"] == {"re": 1.0, "im": 2.0}
    assert d["results"][0]["v"] == "inf"


def test_selftest_passes(capsys):
    code, out, _ = run_cli(capsys, "selftest")
    assert code == 0
    assert all(r["passed"] == "true" for r in rows_of(out))
