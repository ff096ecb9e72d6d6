import csv
import subprocess
import sys

import pytest

from rsma_harq import cli
from rsma_harq.experiment import CSV_FIELDS, ValidationReport

FAST = ["--trials", "500", "--fdma-trials", "10000", "--rate-start", "2", "--rate-stop", "2.5",
        "--rate-step", "0.5"]


def test_sweep_writes_csv(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "--schemes", "RSMA,NOMA", "--harq", "CC", "--retx", "2", *FAST,
                     "--out", str(out), "--quiet"]) == 0
    rows = list(csv.reader(out.open()))
    assert tuple(rows[0]) == CSV_FIELDS
    assert len(rows) == 1 + 2 * 2 * 2


def test_config_file_and_flag_override(tmp_path):
    conf = tmp_path / "c.yaml"
    conf.write_text("schemes: [FDMA]\nkinds: [IR]\nL_values: [1]\ntrials: 300\nfdma_trials: 10000\n"
                    "rate_grid: {start: 1.0, stop: 1.0, step: 1.0}\n")
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "--config", str(conf), "--trials", "200", "--out", str(out), "--quiet"]) == 0
    rows = list(csv.DictReader(out.open()))
    assert {r["scheme"] for r in rows} == {"FDMA"} and {r["trials"] for r in rows} == {"200"}


@pytest.mark.parametrize("argv", [
    ["sweep", "--schemes", "TDMA"],
    ["sweep", "--trials", "0"],
    ["sweep", "--rate-step", "-1"],
    ["single", "--scheme", "FDMA", "--fdma-w1", "1.5", "--trials", "10"],
    ["single", "--harq", "XX", "--trials", "10"],
    ["validate", "--points", "0"],
])
def test_config_errors_exit_1(argv, tmp_path, capsys):
    assert cli.main(argv + (["--out", str(tmp_path / "x.csv"), "--quiet"] if argv[0] == "sweep" else [])) == 1
    assert "config error" in capsys.readouterr().err


def test_bad_yaml_exits_1(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("schemes: [RSMA\n")
    assert cli.main(["sweep", "--config", str(bad), "--out", str(tmp_path / "x.csv"), "--quiet"]) == 1
    unknown = tmp_path / "u.yaml"
    unknown.write_text("colour: blue\n")
    assert cli.main(["sweep", "--config", str(unknown), "--out", str(tmp_path / "x.csv"), "--quiet"]) == 1
    assert cli.main(["sweep", "--config", str(tmp_path / "nope.yaml"), "--quiet"]) == 1


def test_single_prints_key_value_blocks(capsys):
    assert cli.main(["single", "--scheme", "FDMA", "--harq", "IR", "--retx", "1", "--rate", "2",
                     "--trials", "2000", "--fdma-w1", "0.4"]) == 0
    blocks = capsys.readouterr().out.strip().split("\n\n")
    assert len(blocks) == 2
    rec = dict(line.split(": ", 1) for line in blocks[1].splitlines())
    assert list(rec) == list(CSV_FIELDS)
    assert rec["user"] == "2" and rec["fdma_w1"] == "0.4"


def test_validate_exit_codes(monkeypatch, capsys):
    assert cli.main(["validate", "--points", "8", "--mc-draws", "5000"]) == 0
    assert "status: ok" in capsys.readouterr().out
    failing = ValidationReport([], branch_gaps=[(0, 1.0)])
    monkeypatch.setattr(cli, "run_validate", lambda *a, **k: failing)
    assert cli.main(["validate", "--points", "8"]) == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "rsma_harq", "single", "--trials", "200", "--rate", "1.5"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "scheme: RSMA" in out.stdout
