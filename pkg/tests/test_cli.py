from __future__ import annotations

import json
import subprocess
import sys

import pytest

from conftest import WALKTHROUGH


def run_cli(*args: str, expect: int = 0) -> str:
    result = subprocess.run(
        [sys.executable, "-m", "rslice.cli", *args],
        capture_output=True,
        text=True,
    )
    assert result.returncode == expect, result.stderr
    return result.stdout


@pytest.fixture()
def walkthrough_file(tmp_path):
    path = tmp_path / "walkthrough.R"
    path.write_text(WALKTHROUGH)
    return str(path)


def test_analyze_summary(walkthrough_file):
    out = run_cli("analyze", walkthrough_file)
    assert "23 vertices, 27 edges" in out


def test_analyze_lint_text(walkthrough_file):
    out = run_cli("analyze", walkthrough_file, "--lint")
    assert "absolute-file-path" in out


def test_analyze_slice_json(walkthrough_file):
    out = run_cli(
        "analyze", walkthrough_file, "--slice", "3@read.csv", "--forward", "--format", "json"
    )
    payload = json.loads(out)
    assert payload["slice"]["direction"] == "forward"
    assert payload["slice"]["ids"]


def test_analyze_query(walkthrough_file):
    out = run_cli("analyze", walkthrough_file, "--query", '{"type":"dependencies"}', "--format", "json")
    payload = json.loads(out)
    assert len(payload["query"]["dependencies"]["libraries"]) == 2


def test_missing_file_is_analysis_error(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "rslice.cli", "analyze", str(tmp_path / "nope.R")],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 1


def test_usage_error_is_exit_2():
    result = subprocess.run(
        [sys.executable, "-m", "rslice.cli", "analyze"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 2


def test_bad_criterion_is_analysis_error(walkthrough_file):
    result = subprocess.run(
        [sys.executable, "-m", "rslice.cli", "analyze", walkthrough_file, "--slice", "99:99"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 1
