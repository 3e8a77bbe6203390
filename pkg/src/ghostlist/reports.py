"""
Report and trace files.

    <out>/curves.csv      strategy, requests, time, mean_found
    <out>/pervictim.csv   victim, strategy, true_friends, found, percent, best
    <out>/summary.json    per-strategy summary, account loads, ledger length
    <out>/traces/<strategy>/<victim>.jsonl

Every file is UTF-8 with LF line endings, so two runs with the same seeds
produce byte-identical output.
"""

import json
from pathlib import Path
from typing import Any, NoReturn

import pandas as pd
from beartype import beartype

from ghostlist.errors import ExperimentError, TraceFormatError
from ghostlist.harness import ExperimentReport, build_report
from ghostlist.strategies import CrawlTrace, Termination, TraceEvent

CURVES_FILE = "curves.csv"
PER_VICTIM_FILE = "pervictim.csv"
SUMMARY_FILE = "summary.json"
TRACES_DIR = "traces"

EVENT_KEYS = ("no", "t", "kind", "data")


# %% Report files


def curves_frame(report: ExperimentReport) -> pd.DataFrame:
    rows = [
        {"strategy": name, "requests": r, "time": t, "mean_found": mean_found}
        for name in report.strategies
        for (r, mean_found), (t, _) in zip(
            report.curves[name].points, report.curves[name].time_points
        )
    ]
    return pd.DataFrame(rows, columns=["strategy", "requests", "time", "mean_found"])


def per_victim_frame(report: ExperimentReport) -> pd.DataFrame:
    rows = [
        {
            "victim": row.victim,
            "strategy": name,
            "true_friends": report.true_friend_counts[row.victim],
            "found": row.found[name],
            "percent": row.percentages[name],
            "best": name in row.best,
        }
        for row in report.per_victim
        for name in report.strategies
        if name in row.found
    ]
    return pd.DataFrame(
        rows, columns=["victim", "strategy", "true_friends", "found", "percent", "best"]
    )


def report_summary(report: ExperimentReport) -> dict[str, Any]:
    """The summary.json document, with string keys throughout."""
    return {
        "strategies": {
            name: {
                "mean_recall": summary.mean_recall,
                "victims_reached": summary.victims_reached,
                "victims": summary.victims,
                "mean_requests": summary.mean_requests,
                "total_requests": summary.total_requests,
                "terminations": summary.terminations,
            }
            for name, summary in report.summaries.items()
        },
        "accounts": {str(a): n for a, n in sorted(report.accounts.items())},
        "n_accounts": report.n_accounts,
        "ledger_length": report.ledger_length,
    }


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


@beartype
def export_report(report: ExperimentReport, out_dir: Path) -> list[Path]:
    if not report.strategies:
        raise ExperimentError("report has no strategies; nothing written")

    out_dir.mkdir(parents=True, exist_ok=True)
    curves_path = out_dir / CURVES_FILE
    per_victim_path = out_dir / PER_VICTIM_FILE
    summary_path = out_dir / SUMMARY_FILE

    curves_frame(report).to_csv(
        curves_path, index=False, lineterminator="\n", encoding="utf-8"
    )
    per_victim_frame(report).to_csv(
        per_victim_path, index=False, lineterminator="\n", encoding="utf-8"
    )
    _write_text(
        summary_path, json.dumps(report_summary(report), indent=2, sort_keys=True) + "\n"
    )
    return [curves_path, per_victim_path, summary_path]


# %% Trace files


def _event_line(event: TraceEvent) -> str:
    return json.dumps(
        {"no": event.no, "t": event.t, "kind": event.kind, "data": event.data},
        sort_keys=True,
    )


def trace_path(out_dir: Path, trace: CrawlTrace) -> Path:
    return out_dir / TRACES_DIR / trace.strategy_name / f"{trace.victim}.jsonl"


@beartype
def write_traces(report: ExperimentReport, out_dir: Path) -> list[Path]:
    paths = []
    for trace in report.traces:
        start = TraceEvent(
            no=0,
            t=0.0,
            kind="start",
            data={
                "victim": trace.victim,
                "strategy": trace.strategy_name,
                "latency": trace.latency,
                "true_friend_count": report.true_friend_counts[trace.victim],
                "n_accounts": report.n_accounts,
            },
        )
        end = TraceEvent(
            no=trace.requests,
            t=trace.requests * trace.latency,
            kind="end",
            data={
                "terminated_reason": trace.terminated_reason.value,
                "requests": trace.requests,
            },
        )
        path = trace_path(out_dir, trace)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [_event_line(e) for e in [start, *trace.events, end]]
        _write_text(path, "\n".join(lines) + "\n")
        paths.append(path)
    return paths


def _parse_event(path: Path, line_no: int, line: str) -> TraceEvent:
    def fail(reason: str) -> NoReturn:
        raise TraceFormatError(f"{path}, line {line_no}: {reason}")

    try:
        raw = json.loads(line)
    except json.JSONDecodeError as e:
        fail(e.msg)
    if not isinstance(raw, dict) or sorted(raw) != sorted(EVENT_KEYS):
        fail(f"an event needs exactly the keys {list(EVENT_KEYS)}")
    if not isinstance(raw["data"], dict) or not isinstance(raw["kind"], str):
        fail("malformed event")
    if isinstance(raw["no"], bool) or not isinstance(raw["no"], int):
        fail(f"request number {raw['no']!r} is not an integer")
    if isinstance(raw["t"], bool) or not isinstance(raw["t"], int | float):
        fail(f"time {raw['t']!r} is not a number")
    if raw["kind"] == "friend":
        user = raw["data"].get("user")
        if isinstance(user, bool) or not isinstance(user, int):
            fail(f"friend event with user {user!r}")
    return TraceEvent(no=raw["no"], t=raw["t"], kind=raw["kind"], data=raw["data"])


@beartype
def read_trace_file(path: Path) -> tuple[CrawlTrace, int, int]:
    """Returns the trace, the victim's true friend count and the account count."""
    with open(path, encoding="utf-8") as f:
        numbered = [
            (line_no, _parse_event(path, line_no, line))
            for line_no, line in enumerate(f, start=1)
            if line.strip()
        ]
    events = [event for _, event in numbered]
    if len(events) < 2 or events[0].kind != "start" or events[-1].kind != "end":
        raise TraceFormatError(f"{path}: a trace must open with start and close with end")

    start, end = events[0].data, events[-1].data
    try:
        trace = CrawlTrace(
            victim=int(start["victim"]),
            strategy_name=str(start["strategy"]),
            latency=float(start["latency"]),
            events=events[1:-1],
            terminated_reason=Termination(end["terminated_reason"]),
            requests=int(end["requests"]),
        )
        true_friend_count = int(start["true_friend_count"])
        n_accounts = int(start["n_accounts"])
    except (KeyError, TypeError, ValueError) as e:
        raise TraceFormatError(f"{path}: bad start or end event: {e}") from None

    for line_no, event in numbered[1:-1]:
        if not 0 <= event.no <= trace.requests:
            raise TraceFormatError(
                f"{path}, line {line_no}: request number {event.no} "
                f"is outside 0..{trace.requests}"
            )

    trace.friends_found = frozenset(
        event.data["user"] for event in trace.events if event.kind == "friend"
    )
    return trace, true_friend_count, n_accounts


@beartype
def read_traces(in_dir: Path) -> tuple[list[CrawlTrace], dict[int, int], int]:
    """Load every stored trace below `in_dir` (or below `in_dir/traces`)."""
    root = in_dir / TRACES_DIR if (in_dir / TRACES_DIR).is_dir() else in_dir
    paths = sorted(root.glob("*/*.jsonl"))
    if not paths:
        raise ExperimentError(f"no traces found in {in_dir}")

    traces = []
    true_friend_counts: dict[int, int] = {}
    account_counts = set()
    for path in paths:
        trace, true_friend_count, n_accounts = read_trace_file(path)
        traces.append(trace)
        true_friend_counts[trace.victim] = true_friend_count
        account_counts.add(n_accounts)
    if len(account_counts) != 1:
        raise TraceFormatError(
            f"traces in {in_dir} disagree on the account count: {sorted(account_counts)}"
        )
    return traces, true_friend_counts, account_counts.pop()


@beartype
def recompute_report(in_dir: Path) -> ExperimentReport:
    traces, true_friend_counts, n_accounts = read_traces(in_dir)
    return build_report(
        traces=traces, true_friend_counts=true_friend_counts, n_accounts=n_accounts
    )
