"""Command line behaviors: ingest caching, exit codes, simulate and eval-report."""

from __future__ import annotations

import json
import os
import socket

import pytest

from bimnav.service.cli import EXIT_BIND, EXIT_CONFIG, EXIT_DATA, EXIT_FAILURES, EXIT_OK, main

MODEL = "fixtures/building.json"
STEP_MODEL = "fixtures/mini12.ifc"


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for key in list(os.environ):
        if key.startswith("BIMNAV_"):
            monkeypatch.delenv(key)


def _quick_scenarios(tmp_path, expect):
    path = tmp_path / "scenarios.json"
    path.write_text(
        json.dumps(
            {
                "defaults": {"user_start": [2.0, 0.0, 10.0]},
                "cases": [
                    {"name": "coffee", "query": "take me to the coffee shop", "expect": expect}
                ],
            }
        ),
        encoding="utf-8",
    )
    return path


# --- ingest -------------------------------------------------------------------


def test_ingest_builds_a_cache_and_reuses_it(tmp_path, capsys):
    cache = tmp_path / "index.json"
    assert main(["ingest", "--model", MODEL, "--cache", str(cache)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "building: Vector Campus, Floor 2" in out
    assert "entities indexed: 20" in out
    assert cache.exists()

    assert main(["ingest", "--model", MODEL, "--cache", str(cache)]) == EXIT_OK
    assert "cache up to date" in capsys.readouterr().out


def test_ingest_output_is_deterministic(tmp_path):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    main(["ingest", "--model", MODEL, "--cache", str(first)])
    main(["ingest", "--model", MODEL, "--cache", str(second)])
    assert first.read_bytes() == second.read_bytes()


def test_ingest_reports_dropped_elements(tmp_path, capsys):
    cache = tmp_path / "index.json"
    assert main(["ingest", "--model", STEP_MODEL, "--cache", str(cache)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "entities indexed: 11" in out
    assert "dropped void: no placement and no geometry" in out


def test_ingest_grid_preview_prints_the_raster(tmp_path, capsys):
    cache = tmp_path / "index.json"
    main(["ingest", "--model", MODEL, "--cache", str(cache), "--grid-preview"])
    out = capsys.readouterr().out
    rows = [line for line in out.splitlines() if line and set(line) <= {".", "#"}]
    assert len(rows) == 82
    assert all(len(row) == 162 for row in rows)


def test_ingest_missing_model_is_a_data_error(tmp_path, capsys):
    assert main(["ingest", "--model", str(tmp_path / "nope.json")]) == EXIT_DATA
    assert "io error" in capsys.readouterr().err


def test_ingest_truncated_step_is_a_data_error(capsys):
    code = main(["ingest", "--model", "fixtures/mini12_truncated.ifc"])
    assert code == EXIT_DATA
    assert "malformed_step" in capsys.readouterr().err


# --- serve --------------------------------------------------------------------


def test_serve_without_a_model_is_a_config_error(capsys):
    assert main(["serve"]) == EXIT_CONFIG
    assert "model_path" in capsys.readouterr().err


def test_serve_with_an_out_of_range_port_is_a_config_error(capsys):
    assert main(["serve", "--model", MODEL, "--port", "70000"]) == EXIT_CONFIG
    assert "port out of range" in capsys.readouterr().err


def test_serve_on_an_occupied_port_fails_cleanly(capsys):
    holder = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        holder.bind(("127.0.0.1", 0))
        holder.listen(1)
        port = holder.getsockname()[1]
        code = main(["serve", "--model", MODEL, "--port", str(port)])
    finally:
        holder.close()
    assert code == EXIT_BIND
    assert "cannot bind" in capsys.readouterr().err


# --- simulate and eval-report ---------------------------------------------------


def test_simulate_writes_a_report_and_exits_zero(tmp_path, capsys):
    scenarios = _quick_scenarios(
        tmp_path, {"category": "navigation", "goal_ids": ["coffee_shop"]}
    )
    report_path = tmp_path / "report.json"
    code = main(
        ["simulate", "--model", MODEL, "--scenarios", str(scenarios), "--report", str(report_path)]
    )
    assert code == EXIT_OK
    assert "1/1 scenarios passed" in capsys.readouterr().out
    report = json.loads(report_path.read_text("utf-8"))
    assert report["passed"] == 1
    assert report["cases"][0]["goal_ids"] == ["coffee_shop"]


def test_simulate_fails_the_run_when_a_case_fails(tmp_path, capsys):
    scenarios = _quick_scenarios(tmp_path, {"goal_ids": ["reception"]})
    code = main(["simulate", "--model", MODEL, "--scenarios", str(scenarios)])
    assert code == EXIT_FAILURES
    assert "FAIL coffee" in capsys.readouterr().out


def test_simulate_rejects_a_malformed_scenario_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"scenarios": []}), encoding="utf-8")
    assert main(["simulate", "--model", MODEL, "--scenarios", str(bad)]) == EXIT_DATA
    assert "schema_violation" in capsys.readouterr().err


def _eval_report(tmp_path, passed, total):
    cases = [
        {"name": f"case{i}", "passed": i < passed, "failures": [] if i < passed else ["boom"]}
        for i in range(total)
    ]
    path = tmp_path / "report.json"
    path.write_text(
        json.dumps({"total": total, "passed": passed, "failed": total - passed, "cases": cases}),
        encoding="utf-8",
    )
    return path


def test_eval_report_passes_at_the_default_threshold(tmp_path, capsys):
    path = _eval_report(tmp_path, passed=9, total=10)
    assert main(["eval-report", "--report", str(path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "pass rate: 9/10 (90%), required 90%" in out
    assert "FAIL case9 :: boom" in out


def test_eval_report_enforces_a_stricter_threshold(tmp_path, capsys):
    path = _eval_report(tmp_path, passed=9, total=10)
    assert main(["eval-report", "--report", str(path), "--min-pass", "0.95"]) == EXIT_FAILURES
    assert "required 95%" in capsys.readouterr().out
