"""Command-line tests, including a golden-file suite over every command.

Regenerate goldens after an intended output change with
``PCTSCALE_REGEN_GOLDEN=1 pytest tests/test_cli.py``.
"""

import os
from pathlib import Path

import pytest

from pctscale.cli import main
from pctscale.config import COMMANDS, load_config
from pctscale.errors import ConfigError

HERE = Path(__file__).parent
FIX = HERE / "fixtures"
GOLDEN = HERE / "golden"
LIKING = ["liking_1992.csv", "liking_1993.csv", "liking_1994.csv"]

# name -> (config, inputs, command)
CASES = {
    "identity": ("identity.ini", ["identity.csv"]),
    "percentize": ("percentize.ini", ["survey.csv"]),
    "regress": ("regress.ini", ["survey.csv"]),
    "importance": ("importance.ini", ["survey.csv"]),
    "impact": ("impact.ini", ["survey.csv"]),
    "percent_diff": ("percent_diff.ini", ["experiment.csv"]),
    "pool": ("pool.ini", LIKING),
    "mediate": ("mediate.ini", ["chain.csv"]),
    "anchors": ("anchors.ini", ["survey.csv"]),
}


def run_cli(tmp_path, name, fmt, extra=()):
    cfg, inputs = CASES[name]
    out = tmp_path / f"{name}.{fmt}.out"
    argv = ["--config", str(FIX / cfg), "--out", str(out), "--format", fmt, *extra]
    for i in inputs:
        argv += ["--input", str(FIX / i)]
    code = main(argv)
    return code, out


def test_cases_cover_every_command():
    covered = {load_config(FIX / cfg, inputs=[FIX / i for i in inputs]).command for cfg, inputs in CASES.values()}
    assert covered == set(COMMANDS)


@pytest.mark.parametrize("fmt", ["text", "table"])
@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(tmp_path, name, fmt):
    code, out = run_cli(tmp_path, name, fmt)
    assert code == 0
    golden = GOLDEN / f"{name}.{'txt' if fmt == 'text' else 'csv'}"
    produced = out.read_bytes()
    if os.environ.get("PCTSCALE_REGEN_GOLDEN"):
        golden.write_bytes(produced)
    assert produced == golden.read_bytes()


@pytest.mark.parametrize("name", sorted(CASES))
def test_table_output_deterministic(tmp_path, name):
    first = run_cli(tmp_path, name, "table")[1].read_bytes()
    second = run_cli(tmp_path, name, "table")[1].read_bytes()
    assert first == second


def test_identity_regression_shows_unit_coefficient(tmp_path):
    code, out = run_cli(tmp_path, "identity", "text")
    line = next(l for l in out.read_text().splitlines() if l.startswith("x "))
    assert "1.0000" in line and "100.0%" in line


def test_anchor_suggestion_for_age(tmp_path):
    code, out = run_cli(tmp_path, "anchors", "text")
    text = out.read_text()
    assert "age: observed (18, 83)" in text
    first = text.split("age: observed (18, 83)")[1].splitlines()[2]
    assert first.startswith("1. (0, 100)")


def test_undeclared_variable_fails_without_output(tmp_path, capsys):
    out = tmp_path / "report.txt"
    code = main(["--config", str(FIX / "undeclared.ini"), "--input", str(FIX / "survey.csv"), "--out", str(out)])
    assert code == ConfigError.exit_code
    assert not out.exists()
    assert "income" in capsys.readouterr().err


def test_missing_column_maps_to_its_exit_code(tmp_path):
    out = tmp_path / "r.txt"
    code = main(["--config", str(FIX / "regress.ini"), "--input", str(FIX / "identity.csv"), "--out", str(out)])
    assert code == 13
    assert not out.exists()


def test_missing_input_file(tmp_path):
    code = main(["--config", str(FIX / "regress.ini"), "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "r")])
    assert code == 5


def test_parse_error_exit(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1,2\noops,3\n1,1\n")
    code = main(["--config", str(FIX / "identity.ini"), "--input", str(bad), "--out", str(tmp_path / "r")])
    assert code == 40


def test_rank_deficient_exit(tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("y,a,b\n1,1,2\n2,2,4\n3,3,6\n4,4,8\n5,1,2\n")
    cfg = tmp_path / "c.ini"
    cfg.write_text(
        "[analysis]\ncommand = regress\n"
        "[variable y]\nrole = dependent\nc_n = 0\nc_x = 10\n"
        "[variable a]\nc_n = 0\nc_x = 10\n"
        "[variable b]\nc_n = 0\nc_x = 20\n"
    )
    assert main(["--config", str(cfg), "--input", str(data), "--out", str(tmp_path / "r")]) == 20


def test_stdout_when_no_out(capsys):
    code = main(["--config", str(FIX / "identity.ini"), "--input", str(FIX / "identity.csv"), "--format", "table"])
    assert code == 0
    assert capsys.readouterr().out.startswith("variable,b_p,se,ci_low,ci_high,rank\n")


def test_tab_delimiter(tmp_path):
    data = tmp_path / "d.tsv"
    data.write_text("x\ty\n1\t1\n2\t2\n3\t3.5\n")
    out = tmp_path / "t.tsv"
    code = main(["--config", str(FIX / "identity.ini"), "--input", str(data), "--out", str(out), "--format", "table", "--delimiter", "\\t"])
    assert code == 0
    assert out.read_text().splitlines()[0] == "variable\tb_p\tse\tci_low\tci_high\trank"


def test_precision_flag(tmp_path):
    code, out = run_cli(tmp_path, "identity", "table", extra=["--precision", "2"])
    assert out.read_text().splitlines()[2].startswith("x,1.00,")


def test_pool_endpoints_in_table(tmp_path):
    code, out = run_cli(tmp_path, "pool", "table")
    lines = out.read_text().splitlines()
    header = lines[0].split(",")
    liking = [float(l.split(",")[header.index("liking")]) for l in lines[1:]]
    part = [l.split(",")[header.index("part")] for l in lines[1:]]
    # fixtures put 1 and the top of each scale in the first two rows of every part
    for p in ("1", "2", "3"):
        rows = [v for v, q in zip(liking, part) if q == p]
        assert rows[0] == 0 and rows[1] == 1


def test_failed_write_leaves_nothing(tmp_path):
    target = tmp_path / "missing_dir" / "r.txt"
    code = main(["--config", str(FIX / "identity.ini"), "--input", str(FIX / "identity.csv"), "--out", str(target)])
    assert code == 5
    assert not target.exists()
