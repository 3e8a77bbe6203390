import json
from pathlib import Path

import pandas as pd
import pytest

from ghostlist import fixtures
from ghostlist.config import GenParams, StrategyConfig
from ghostlist.errors import ExperimentError, TraceFormatError
from ghostlist.harness import ExperimentSpec, run_experiment
from ghostlist.reports import (
    CURVES_FILE,
    PER_VICTIM_FILE,
    SUMMARY_FILE,
    export_report,
    read_traces,
    recompute_report,
    report_summary,
)


def create_mock_crawl_output(tmp_path: Path, seed: int = 7) -> Path:
    out_dir = tmp_path / f"run-{seed}"
    run_experiment(
        ExperimentSpec(
            gen_params=GenParams(n_users=40),
            graph_seed=seed,
            victims="all",
            strategy_config=StrategyConfig(budget=60, run_seed=seed),
            output_dir=out_dir,
        )
    )
    return out_dir


def test_w1_report_files(tmp_path: Path):
    report = run_experiment(
        ExperimentSpec(
            graph=fixtures.world_w1(),
            victims=(1,),
            strategies=("s1",),
            output_dir=tmp_path,
        )
    )
    curves = pd.read_csv(tmp_path / CURVES_FILE)
    assert list(curves.columns) == ["strategy", "requests", "time", "mean_found"]
    assert curves["mean_found"].is_monotonic_increasing
    assert curves["mean_found"].iloc[-1] == 2
    assert curves["time"].iloc[-1] == 4.0

    per_victim = pd.read_csv(tmp_path / PER_VICTIM_FILE)
    assert per_victim.to_dict("records") == [
        {
            "victim": 1,
            "strategy": "s1",
            "true_friends": 2,
            "found": 2,
            "percent": 100.0,
            "best": True,
        }
    ]

    summary = json.loads((tmp_path / SUMMARY_FILE).read_text(encoding="utf-8"))
    assert summary == report_summary(report)
    assert summary["strategies"]["s1"]["mean_recall"] == 1.0
    assert summary["ledger_length"] == 8


def test_traces_are_written_per_strategy_and_victim(tmp_path: Path):
    run_experiment(
        ExperimentSpec(graph=fixtures.world_w2(), victims=(1,), output_dir=tmp_path)
    )
    trace_file = tmp_path / "traces" / "s4" / "1.jsonl"
    lines = trace_file.read_text(encoding="utf-8").splitlines()
    events = [json.loads(line) for line in lines]
    assert events[0]["kind"] == "start"
    assert events[0]["data"]["true_friend_count"] == 2
    assert events[-1] == {
        "no": 5,
        "t": 2.5,
        "kind": "end",
        "data": {"terminated_reason": "exhausted", "requests": 5},
    }
    assert sorted((tmp_path / "traces").iterdir()) == [
        tmp_path / "traces" / name for name in ("s1", "s2", "s3", "s4")
    ]


def test_files_use_lf_line_endings(tmp_path: Path):
    out_dir = create_mock_crawl_output(tmp_path)
    for name in (CURVES_FILE, PER_VICTIM_FILE, SUMMARY_FILE):
        assert b"\r\n" not in (out_dir / name).read_bytes()


def test_identical_seeds_give_identical_bytes(tmp_path: Path):
    first = create_mock_crawl_output(tmp_path / "a")
    second = create_mock_crawl_output(tmp_path / "b")
    for name in (CURVES_FILE, PER_VICTIM_FILE, SUMMARY_FILE):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_recompute_is_byte_identical(tmp_path: Path):
    out_dir = create_mock_crawl_output(tmp_path)
    recomputed_dir = tmp_path / "recomputed"
    export_report(recompute_report(out_dir), recomputed_dir)
    for name in (CURVES_FILE, PER_VICTIM_FILE, SUMMARY_FILE):
        assert (out_dir / name).read_bytes() == (recomputed_dir / name).read_bytes()


def test_recompute_from_the_traces_directory(tmp_path: Path):
    out_dir = create_mock_crawl_output(tmp_path)
    traces, friend_counts, n_accounts = read_traces(out_dir / "traces")
    assert n_accounts == 9
    assert {t.strategy_name for t in traces} == {"s1", "s2", "s3", "s4"}
    assert set(friend_counts) == {t.victim for t in traces}


def test_empty_report_is_not_written(tmp_path: Path):
    report = run_experiment(ExperimentSpec(graph=fixtures.world_w1(), victims=(1,)))
    report.strategies = []
    with pytest.raises(ExperimentError):
        export_report(report, tmp_path / "out")
    assert not (tmp_path / "out").exists()


def test_empty_directory(tmp_path: Path):
    with pytest.raises(ExperimentError, match="no traces"):
        recompute_report(tmp_path)


def test_corrupt_line_is_named(tmp_path: Path):
    out_dir = create_mock_crawl_output(tmp_path)
    trace_file = sorted((out_dir / "traces" / "s2").glob("*.jsonl"))[0]
    lines = trace_file.read_text(encoding="utf-8").splitlines()
    lines[1] = lines[1][:-3]
    trace_file.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(TraceFormatError, match=rf"{trace_file.name}, line 2"):
        recompute_report(out_dir)


def test_truncated_trace(tmp_path: Path):
    out_dir = create_mock_crawl_output(tmp_path)
    trace_file = sorted((out_dir / "traces" / "s4").glob("*.jsonl"))[0]
    lines = trace_file.read_text(encoding="utf-8").splitlines()
    trace_file.write_text("\n".join(lines[:-1]) + "\n", encoding="utf-8")
    with pytest.raises(TraceFormatError, match="start and close with end"):
        recompute_report(out_dir)


def create_mock_w1_trace_dir(tmp_path: Path) -> tuple[Path, Path]:
    run_experiment(
        ExperimentSpec(
            graph=fixtures.world_w1(), victims=(1,), strategies=("s1",), output_dir=tmp_path
        )
    )
    return tmp_path, tmp_path / "traces" / "s1" / "1.jsonl"


def rewrite_first_friend_event(trace_file: Path, **changes) -> int:
    lines = trace_file.read_text(encoding="utf-8").splitlines()
    for index, line in enumerate(lines):
        event = json.loads(line)
        if event["kind"] == "friend":
            event.update(changes.get("event", {}))
            for key in changes.get("drop_data", ()):
                del event["data"][key]
            lines[index] = json.dumps(event, sort_keys=True)
            break
    trace_file.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return index + 1


def test_non_integer_request_number(tmp_path: Path):
    out_dir, trace_file = create_mock_w1_trace_dir(tmp_path)
    line_no = rewrite_first_friend_event(trace_file, event={"no": "four"})
    with pytest.raises(TraceFormatError, match=rf"line {line_no}: request number"):
        recompute_report(out_dir)


def test_non_numeric_time(tmp_path: Path):
    out_dir, trace_file = create_mock_w1_trace_dir(tmp_path)
    line_no = rewrite_first_friend_event(trace_file, event={"t": None})
    with pytest.raises(TraceFormatError, match=rf"line {line_no}: time"):
        recompute_report(out_dir)


def test_friend_event_without_user(tmp_path: Path):
    out_dir, trace_file = create_mock_w1_trace_dir(tmp_path)
    line_no = rewrite_first_friend_event(trace_file, drop_data=("user",))
    with pytest.raises(TraceFormatError, match=rf"line {line_no}: friend event"):
        recompute_report(out_dir)


def test_request_number_out_of_range(tmp_path: Path):
    for bad_no in (-3, 10**6):
        out_dir, trace_file = create_mock_w1_trace_dir(tmp_path / str(bad_no))
        line_no = rewrite_first_friend_event(trace_file, event={"no": bad_no})
        with pytest.raises(TraceFormatError, match=rf"line {line_no}: request number {bad_no} is outside 0..8"):
            recompute_report(out_dir)
