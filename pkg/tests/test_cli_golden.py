"""CLI behavior locked by golden transcripts, plus exit codes."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from itreesim.corpus import corpus_path

GOLDEN = Path(__file__).parent / "golden"


def run_cli(args, stdin=""):
    return subprocess.run(
        [sys.executable, "-m", "itreesim", *args],
        input=stdin,
        capture_output=True,
        text=True,
        timeout=120,
    )


def check_golden(name, args, stdin):
    out = run_cli(args, stdin)
    assert out.returncode == 0, out.stderr
    want = (GOLDEN / name).read_text()
    assert out.stdout == want


BUFFER = str(corpus_path("buffer.itp"))
DEMO = str(corpus_path("demo.itp"))


def test_golden_buffer_session():
    check_golden(
        "buffer_session.txt",
        ["sim", BUFFER, "buffer", "--init", "[]"],
        "Input.1\nInput.2\nState.[1,2]\nOutput.9\n!!\nOutput.1\nState.[2]\n",
    )


def test_golden_cbuffer_session():
    check_golden(
        "cbuffer_session.txt",
        ["sim", BUFFER, "cbuffer"],
        "Input.3\n0\n",
    )


def test_golden_spin_prompt():
    check_golden("spin_prompt.txt", ["sim", DEMO, "spin"], "Y\nN\n")


def test_golden_dead():
    check_golden("dead.txt", ["sim", DEMO, "dead"], "")


def test_golden_finish():
    check_golden("finish.txt", ["sim", DEMO, "finish"], "Output.1\n")


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.itp"
    bad.write_text("process p = (skip\n")
    out = run_cli(["sim", str(bad), "p"])
    assert out.returncode == 2
    assert "parse error" in out.stderr


def test_elab_error_exit_code(tmp_path):
    bad = tmp_path / "bad.itp"
    bad.write_text("process p = do { x <- nochan?{0..1} ; ret x }\n")
    out = run_cli(["enum", "traces", str(bad), "p"])
    assert out.returncode == 2
    assert "not declared" in out.stderr


def test_missing_file_exit_code():
    out = run_cli(["sim", "nope.itp", "p"])
    assert out.returncode == 2


def test_enum_failures_json_schema():
    out = run_cli(
        ["enum", "failures", BUFFER, "buffer", "--init", "[]", "--len", "1", "--format", "json"]
    )
    assert out.returncode == 0
    records = [json.loads(line) for line in out.stdout.splitlines()]
    assert records
    for r in records:
        assert r["kind"] == "failure"
        assert r["refusal"] == "all-except-enabled"
        assert isinstance(r["trace"], list)
        assert isinstance(r["enabled"], list)


def test_enum_divergences_on_spin():
    out = run_cli(["enum", "divergences", DEMO, "spin", "--len", "2"])
    assert out.returncode == 0
    assert "all extensions" in out.stdout


def test_check_laws_exit_zero():
    out = run_cli(["check", "laws", DEMO, "finish"])
    assert out.returncode == 0
    assert "FAIL" not in out.stdout


def test_check_health_on_finish():
    out = run_cli(["check", "health", DEMO, "finish", "--len", "3"])
    assert out.returncode == 0, out.stdout
    assert "FAIL" not in out.stdout


def test_check_health_json_records():
    out = run_cli(["check", "health", DEMO, "finish", "--len", "3", "--format", "json"])
    assert out.returncode == 0
    records = [json.loads(line) for line in out.stdout.splitlines()]
    assert all(r["kind"] == "health" and r["status"] in ("pass", "fail", "unknown") for r in records)


def test_tau_limit_flag():
    out = run_cli(["sim", DEMO, "spin", "--tau-limit", "5"], "N\n")
    assert out.returncode == 0
    assert "Many steps (> 5); Continue? Ended." in out.stdout


def test_max_depth_flag():
    out = run_cli(["sim", DEMO, "finish", "--max-depth", "1"], "Output.1\n")
    assert out.returncode == 0
    assert "Ended." in out.stdout


def test_max_menu_display_cap():
    out = run_cli(["sim", BUFFER, "buffer", "--init", "[]", "--max-menu", "2"], "")
    assert out.returncode == 0
    assert "Events: [Input.0, Input.1, ... (+3 more)]" in out.stdout
