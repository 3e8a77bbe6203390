import threading
from collections import Counter
from collections.abc import Collection, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from rich.progress import track

from ghostlist.client import HttpOracle
from ghostlist.config import (
    DEFAULT_N_ACCOUNTS,
    GenParams,
    ServiceConfig,
    StrategyConfig,
)
from ghostlist.errors import ExperimentError, ParamError
from ghostlist.generator import generate_graph
from ghostlist.graph_io import load_graph
from ghostlist.seeding import derive_generator
from ghostlist.service import (
    FanSample,
    Hidden,
    MemberPage,
    MutualResult,
    Oracle,
    OsnService,
    ReactionSet,
)
from ghostlist.strategies import (
    AVAILABLE_STRATEGIES,
    EVALUATED_STRATEGIES,
    CrawlTrace,
    Termination,
    get_strategy,
)
from ghostlist.world import SocialGraph

# %% Account scheduling


class AccountPool:
    """Round-robin scheduler: the k-th call overall goes to account k mod n."""

    def __init__(self, oracle: Oracle, n_accounts: int = DEFAULT_N_ACCOUNTS):
        if n_accounts < 1:
            raise ParamError(f"n_accounts must be at least 1, and it is {n_accounts}.")
        self.oracle = oracle
        self.n_accounts = n_accounts
        self.requests = [0] * n_accounts
        self._calls = 0
        self._lock = threading.Lock()

    @property
    def latency(self) -> float:
        return self.oracle.latency

    def next_account(self) -> int:
        with self._lock:
            account_id = self._calls % self.n_accounts
            self._calls += 1
            self.requests[account_id] += 1
            return account_id

    def requests_by_account(self) -> dict[int, int]:
        with self._lock:
            return dict(enumerate(self.requests))

    def get_liked_pages(self, user_id: int) -> frozenset[int] | Hidden:
        return self.oracle.get_liked_pages(self.next_account(), user_id)

    def facepile(self, page_id: int, call_seed: int) -> FanSample:
        return self.oracle.facepile(self.next_account(), page_id, call_seed)

    def mutual_content(self, a: int, b: int) -> MutualResult:
        return self.oracle.mutual_content(self.next_account(), a, b)

    def get_public_pictures(self, user_id: int) -> frozenset[int]:
        return self.oracle.get_public_pictures(self.next_account(), user_id)

    def get_picture_reactions(self, picture_id: int) -> ReactionSet:
        return self.oracle.get_picture_reactions(self.next_account(), picture_id)

    def get_groups(self, user_id: int) -> frozenset[int] | Hidden:
        return self.oracle.get_groups(self.next_account(), user_id)

    def get_group_members(self, group_id: int, page_index: int) -> MemberPage:
        return self.oracle.get_group_members(self.next_account(), group_id, page_index)


def round_robin_loads(total_requests: int, n_accounts: int) -> dict[int, int]:
    base, extra = divmod(total_requests, n_accounts)
    return {account_id: base + (account_id < extra) for account_id in range(n_accounts)}


# %% Experiment description


@dataclass
class ExperimentSpec:
    graph: SocialGraph | None = None
    graph_path: Path | None = None
    gen_params: GenParams | None = None
    graph_seed: int = 0
    service_url: str | None = None
    victims: str | tuple[int, ...] = "all-private"
    strategies: tuple[str, ...] = EVALUATED_STRATEGIES
    strategy_config: StrategyConfig = field(default_factory=StrategyConfig)
    service_config: ServiceConfig = field(default_factory=ServiceConfig)
    n_accounts: int = DEFAULT_N_ACCOUNTS
    output_dir: Path | None = None
    jobs: int = 1

    def __post_init__(self) -> None:
        sources = [
            self.graph is not None,
            self.graph_path is not None,
            self.gen_params is not None,
            self.service_url is not None,
        ]
        if sum(sources) != 1:
            raise ParamError(
                "exactly one graph source is needed: an in-memory graph, a graph file, generation parameters or a service url."
            )
        if self.n_accounts < 1:
            raise ParamError(f"n_accounts must be at least 1, and it is {self.n_accounts}.")
        if self.jobs < 1:
            raise ParamError(f"jobs must be at least 1, and it is {self.jobs}.")
        if not self.strategies:
            raise ExperimentError("no strategies to run")
        for name in self.strategies:
            get_strategy(name)
        if isinstance(self.victims, str):
            parse_victim_selection(self.victims)


def parse_victim_selection(selection: str) -> tuple[str, int]:
    """'all', 'all-private' or 'random:K'."""
    if selection in ("all", "all-private"):
        return selection, 0
    kind, _, count = selection.partition(":")
    if kind == "random" and count.isdigit():
        return kind, int(count)
    raise ParamError(
        f"invalid victim selection. It should be 'all', 'all-private', 'random:K' or a list of ids, and you chose {selection}."
    )


def select_victims(
    graph: SocialGraph, selection: str | Sequence[int], run_seed: int
) -> list[int]:
    if not isinstance(selection, str):
        unknown = sorted(set(selection) - set(graph.users))
        if unknown:
            raise ParamError(f"unknown victim ids: {unknown}")
        return sorted(set(selection))

    kind, count = parse_victim_selection(selection)
    everyone = sorted(graph.users)
    match kind:
        case "all":
            return everyone
        case "all-private":
            return [u for u in everyone if not graph.users[u].privacy.friends_visible]
        case _:
            rng = derive_generator("victims", run_seed)
            picked = rng.choice(len(everyone), size=min(count, len(everyone)), replace=False)
            return sorted(everyone[int(i)] for i in picked)


# %% Report


@dataclass
class RecallCurve:
    strategy_name: str
    points: list[tuple[int, float]]
    time_points: list[tuple[float, float]]


@dataclass
class NormalizedRow:
    victim: int
    found: dict[str, int]
    best: tuple[str, ...]
    percentages: dict[str, float]


@dataclass
class StrategySummary:
    strategy: str
    victims: int
    victims_reached: int
    mean_recall: float | None
    mean_requests: float
    total_requests: int
    terminations: dict[str, int]


@dataclass
class ExperimentReport:
    strategies: list[str]
    curves: dict[str, RecallCurve]
    per_victim: list[NormalizedRow]
    summaries: dict[str, StrategySummary]
    true_friend_counts: dict[int, int]
    accounts: dict[int, int]
    ledger_length: int
    n_accounts: int
    traces: list[CrawlTrace] = field(repr=False, default_factory=list)

    @property
    def victims_reached(self) -> dict[str, int]:
        return {name: s.victims_reached for name, s in self.summaries.items()}

    @property
    def mean_recall(self) -> dict[str, float | None]:
        return {name: s.mean_recall for name, s in self.summaries.items()}

    def recall_fractions(self, strategy_name: str) -> dict[int, float | None]:
        return {
            trace.victim: recall_fraction(
                len(trace.friends_found), self.true_friend_counts[trace.victim]
            )
            for trace in self.traces
            if trace.strategy_name == strategy_name
        }


def recall_fraction(found: int, true_count: int) -> float | None:
    if true_count == 0:
        return None
    return found / true_count


def recall_curve(traces: Sequence[CrawlTrace]) -> RecallCurve:
    """Mean friends found after each request index, carrying finished runs forward."""
    if not traces:
        raise ExperimentError("cannot build a recall curve from no traces")
    names = {trace.strategy_name for trace in traces}
    if len(names) != 1:
        raise ParamError(f"traces from several strategies: {sorted(names)}")

    horizon = max(trace.requests for trace in traces)
    found = np.zeros((len(traces), horizon + 1))
    for row, trace in enumerate(traces):
        for request_no in trace.discoveries():
            found[row, request_no:] += 1
    mean_found = found.mean(axis=0)

    latency = traces[0].latency
    return RecallCurve(
        strategy_name=names.pop(),
        points=[(r, float(mean_found[r])) for r in range(horizon + 1)],
        time_points=[(r * latency, float(mean_found[r])) for r in range(horizon + 1)],
    )


def per_victim_best(
    found_counts: Mapping[int, Mapping[str, int]],
) -> list[NormalizedRow]:
    """
    Per victim, the strategy that found most friends counts as 100% and the
    others as a share of it. Victims nobody found anything for are left out.
    """
    rows = []
    for victim in sorted(found_counts):
        counts = found_counts[victim]
        best_count = max(counts.values(), default=0)
        if best_count == 0:
            continue
        rows.append(
            NormalizedRow(
                victim=victim,
                found=dict(counts),
                best=tuple(name for name, count in counts.items() if count == best_count),
                percentages={
                    name: round(count / best_count * 100, 1)
                    for name, count in counts.items()
                },
            )
        )
    return rows


def summarize_strategy(
    strategy_name: str, traces: Sequence[CrawlTrace], true_friend_counts: Mapping[int, int]
) -> StrategySummary:
    fractions = [
        fraction
        for trace in traces
        if (
            fraction := recall_fraction(
                len(trace.friends_found), true_friend_counts[trace.victim]
            )
        )
        is not None
    ]
    terminations = Counter(trace.terminated_reason.value for trace in traces)
    total_requests = sum(trace.requests for trace in traces)
    return StrategySummary(
        strategy=strategy_name,
        victims=len(traces),
        victims_reached=sum(1 for trace in traces if trace.friends_found),
        mean_recall=sum(fractions) / len(fractions) if fractions else None,
        mean_requests=total_requests / len(traces) if traces else 0.0,
        total_requests=total_requests,
        terminations={reason.value: terminations[reason.value] for reason in Termination},
    )


def order_strategies(names: Collection[str]) -> list[str]:
    return [name for name in AVAILABLE_STRATEGIES if name in names]


def build_report(
    traces: Sequence[CrawlTrace],
    true_friend_counts: Mapping[int, int],
    n_accounts: int,
) -> ExperimentReport:
    """Single-threaded reduction; independent of the order traces finished in."""
    if not traces:
        raise ExperimentError("no traces to report on")
    strategies = order_strategies({trace.strategy_name for trace in traces})
    rank = {name: i for i, name in enumerate(strategies)}
    ordered = sorted(traces, key=lambda t: (t.victim, rank[t.strategy_name]))

    by_strategy = {
        name: [trace for trace in ordered if trace.strategy_name == name]
        for name in strategies
    }
    found_counts: dict[int, dict[str, int]] = {}
    for trace in ordered:
        found_counts.setdefault(trace.victim, {})[trace.strategy_name] = len(
            trace.friends_found
        )
    ledger_length = sum(trace.requests for trace in ordered)

    return ExperimentReport(
        strategies=strategies,
        curves={name: recall_curve(by_strategy[name]) for name in strategies},
        per_victim=per_victim_best(found_counts),
        summaries={
            name: summarize_strategy(name, by_strategy[name], true_friend_counts)
            for name in strategies
        },
        true_friend_counts={
            victim: true_friend_counts[victim] for victim in sorted(found_counts)
        },
        accounts=round_robin_loads(ledger_length, n_accounts),
        ledger_length=ledger_length,
        n_accounts=n_accounts,
        traces=ordered,
    )


# %% Running


def resolve_graph(spec: ExperimentSpec) -> SocialGraph:
    if spec.graph is not None:
        return spec.graph
    if spec.graph_path is not None:
        return load_graph(spec.graph_path)
    if spec.gen_params is not None:
        return generate_graph(spec.gen_params, spec.graph_seed)
    assert spec.service_url is not None
    return HttpOracle(spec.service_url).fetch_graph()


def _crawl_victim(
    victim: int, strategies: Sequence[str], pool: AccountPool, cfg: StrategyConfig
) -> list[CrawlTrace]:
    return [get_strategy(name)(victim, pool, cfg) for name in strategies]


def run_experiment(spec: ExperimentSpec, verbose: bool = False) -> ExperimentReport:
    graph = resolve_graph(spec)
    victims = select_victims(graph, spec.victims, spec.strategy_config.run_seed)
    if not victims:
        raise ExperimentError(f"victim selection {spec.victims!r} matched nobody")

    oracle: HttpOracle | OsnService
    if spec.service_url is not None:
        oracle = HttpOracle(spec.service_url)
        ledger_before = oracle.fetch_ledger()["length"]
    else:
        oracle = OsnService(graph=graph, config=spec.service_config)
        ledger_before = 0
    pool = AccountPool(oracle=oracle, n_accounts=spec.n_accounts)
    strategies = order_strategies(spec.strategies)

    traces: list[CrawlTrace] = []
    if spec.jobs == 1:
        victim_iter = (
            track(victims, description="Crawling victims...") if verbose else victims
        )
        for victim in victim_iter:
            traces.extend(_crawl_victim(victim, strategies, pool, spec.strategy_config))
    else:
        with ThreadPoolExecutor(max_workers=spec.jobs) as executor:
            for victim_traces in executor.map(
                lambda v: _crawl_victim(v, strategies, pool, spec.strategy_config),
                victims,
            ):
                traces.extend(victim_traces)

    issued = sum(trace.requests for trace in traces)
    if isinstance(oracle, HttpOracle):
        ledger_length = oracle.fetch_ledger()["length"] - ledger_before
    else:
        ledger_length = len(oracle.ledger)
        served = oracle.requests_by_account()
        if any(served.get(a, 0) != n for a, n in pool.requests_by_account().items()):
            raise ExperimentError(
                f"per-account ledger {served} disagrees with the scheduler {pool.requests_by_account()}"
            )
    if ledger_length != issued:
        raise ExperimentError(
            f"ledger holds {ledger_length} requests but the traces account for {issued}"
        )

    report = build_report(
        traces=traces,
        true_friend_counts={v: len(graph.friends_of(v)) for v in victims},
        n_accounts=spec.n_accounts,
    )
    if spec.output_dir is not None:
        from ghostlist.reports import export_report, write_traces

        export_report(report, spec.output_dir)
        write_traces(report, spec.output_dir)
    return report
