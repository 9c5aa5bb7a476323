import json
from pathlib import Path

import pytest

from debiaswb.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def ingest_severity(tmp_path, capsys, data_dir="wb"):
    return run(
        capsys,
        "--config", str(FIXTURES / "severity.config.json"),
        "--data-dir", str(tmp_path / data_dir),
        "ingest", str(FIXTURES / "severity.csv"),
        "--schema", str(FIXTURES / "severity.schema.json"),
        "--split", "0.2", "--seed", "7",
    )


def test_ingest_and_bias_report_print_worked_example(tmp_path, capsys):
    code, out, _ = ingest_severity(tmp_path, capsys)
    assert code == 0
    assert "720 train rows" in out

    code, out, _ = run(capsys, "--config", str(FIXTURES / "severity.config.json"),
                       "--data-dir", str(tmp_path / "wb"), "report", "--bias")
    assert code == 0
    assert "1.00" in out and "0.30" in out and "0.50" in out
    moderate_line = next(line for line in out.splitlines() if "moderate" in line)
    assert "0.30" in moderate_line
    assert "NO" in moderate_line  # uncovered at threshold 200
    assert "coverage threshold 200" in out


def test_report_segments_single_variable(tmp_path, capsys):
    ingest_severity(tmp_path, capsys)
    code, out, _ = run(capsys, "--data-dir", str(tmp_path / "wb"),
                       "--session", "severity", "report", "--segments", "severity")
    assert code == 0
    assert "severity" in out and "age" not in out.splitlines()[2]


def test_history_on_fresh_session_has_zero_deltas(tmp_path, capsys):
    ingest_severity(tmp_path, capsys)
    code, out, _ = run(capsys, "--data-dir", str(tmp_path / "wb"),
                       "--session", "severity", "history")
    assert code == 0
    lines = [l for l in out.splitlines() if l.strip()]
    assert len(lines) == 3  # header, rule, baseline row
    assert "baseline" in lines[2]
    assert "(+0.0000)" in lines[2]


def test_quality_report_runs(tmp_path, capsys):
    ingest_severity(tmp_path, capsys)
    code, out, _ = run(capsys, "--data-dir", str(tmp_path / "wb"),
                       "--session", "severity", "report", "--quality")
    assert code == 0
    assert "overall quality" in out


def test_augment_edit_retrain_roundtrip(tmp_path, capsys):
    ingest_severity(tmp_path, capsys)
    constraints = tmp_path / "c.json"
    constraints.write_text(json.dumps({
        "joint": True,
        "constraints": [{"variable": "severity", "categories": ["moderate"], "count": 40}],
    }))
    code, out, _ = run(capsys, "--data-dir", str(tmp_path / "wb"), "--session", "severity",
                       "augment", "--constraints", str(constraints), "--seed", "5")
    assert code == 0
    assert "generated batch" in out

    code, out, _ = run(capsys, "--data-dir", str(tmp_path / "wb"), "--session", "severity",
                       "retrain", "--ack")
    assert code == 0
    assert "history index 1" in out

    code, out, _ = run(capsys, "--data-dir", str(tmp_path / "wb"), "--session", "severity",
                       "history")
    assert "retrain" in out

    code, out, _ = run(capsys, "--data-dir", str(tmp_path / "wb"), "--session", "severity",
                       "revert", "--index", "0")
    assert code == 0
    assert "reverted" in out


def test_retrain_without_ack_fails_with_nonzero_exit(tmp_path, capsys):
    ingest_severity(tmp_path, capsys)
    constraints = tmp_path / "c.json"
    constraints.write_text(json.dumps({
        "joint": True,
        "constraints": [{"variable": "severity", "categories": ["moderate"], "count": 10}],
    }))
    run(capsys, "--data-dir", str(tmp_path / "wb"), "--session", "severity",
        "augment", "--constraints", str(constraints))
    code, _, err = run(capsys, "--data-dir", str(tmp_path / "wb"), "--session", "severity",
                       "retrain")
    assert code == 1
    assert "acknowledgement_required" in err


def test_json_output_is_byte_stable_across_fresh_runs(tmp_path, capsys):
    outputs = []
    for name in ("a", "b"):
        ingest_severity(tmp_path, capsys, data_dir=name)
        _, bias, _ = run(capsys, "--json", "--data-dir", str(tmp_path / name),
                         "--session", "severity", "report", "--bias")
        _, hist, _ = run(capsys, "--json", "--data-dir", str(tmp_path / name),
                         "--session", "severity", "history")
        outputs.append((bias, hist))
    assert outputs[0] == outputs[1]
    assert "timestamp" not in outputs[0][1]


def test_error_exit_code_for_missing_session(tmp_path, capsys):
    code, _, err = run(capsys, "--data-dir", str(tmp_path / "none"), "report", "--bias")
    assert code == 1
    assert "unknown_session" in err or "error" in err


def test_make_benchmark_and_baseline(tmp_path, capsys):
    code, out, _ = run(capsys, "make-benchmark", "--out", str(tmp_path / "bench"))
    assert code == 0
    assert (tmp_path / "bench" / "benchmark.csv").exists()

    code, _, _ = run(
        capsys,
        "--config", str(tmp_path / "bench" / "benchmark.config.json"),
        "--data-dir", str(tmp_path / "wb"),
        "ingest", str(tmp_path / "bench" / "benchmark.csv"),
        "--schema", str(tmp_path / "bench" / "benchmark.schema.json"),
    )
    assert code == 0

    code, out, _ = run(capsys, "--json",
                       "--config", str(tmp_path / "bench" / "benchmark.config.json"),
                       "--data-dir", str(tmp_path / "wb"),
                       "baseline", "--budget", "3")
    assert code == 0
    payload = json.loads(out)
    assert payload["after"]["rr"] >= payload["before"]["rr"]
    assert payload["after"]["cr"] >= payload["before"]["cr"]


def test_ratio_bench_emits_trend_table(capsys):
    code, out, _ = run(capsys, "ratio-bench", "--seeds", "2")
    assert code == 0
    assert "log ratio" in out
    assert "ratio < 1" in out and "ratio >= 1" in out
