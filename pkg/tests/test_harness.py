import pytest

from ghostlist import fixtures
from ghostlist.config import GenParams, ServiceConfig, StrategyConfig
from ghostlist.errors import ExperimentError, ParamError
from ghostlist.harness import (
    AccountPool,
    ExperimentSpec,
    build_report,
    per_victim_best,
    recall_curve,
    round_robin_loads,
    run_experiment,
    select_victims,
)
from ghostlist.reports import report_summary
from ghostlist.server import spawn_http_server
from ghostlist.service import OsnService
from ghostlist.strategies import EVALUATED_STRATEGIES, CrawlTrace, TraceEvent


def create_mock_trace(
    discoveries: list[int], requests: int, strategy_name: str = "s4", victim: int = 1
) -> CrawlTrace:
    return CrawlTrace(
        victim=victim,
        strategy_name=strategy_name,
        latency=0.5,
        events=[
            TraceEvent(no=no, t=no * 0.5, kind="friend", data={"user": 100 + i})
            for i, no in enumerate(discoveries)
        ],
        friends_found=frozenset(100 + i for i in range(len(discoveries))),
        requests=requests,
    )


# %% Scheduling


def test_round_robin_spreads_calls_evenly():
    service = OsnService(fixtures.world_w1())
    pool = AccountPool(service, n_accounts=9)
    for _ in range(90):
        pool.mutual_content(1, 2)
    assert service.requests_by_account() == {a: 10 for a in range(9)}
    assert pool.requests_by_account() == service.requests_by_account()


def test_round_robin_loads():
    loads = round_robin_loads(total_requests=22, n_accounts=9)
    assert sum(loads.values()) == 22
    assert max(loads.values()) - min(loads.values()) <= 1
    assert loads[0] == 3 and loads[8] == 2


def test_pool_needs_an_account():
    with pytest.raises(ParamError):
        AccountPool(OsnService(fixtures.world_w1()), n_accounts=0)


# %% Curves and normalisation


def test_recall_curve_steps():
    curve = recall_curve([create_mock_trace(discoveries=[4, 7], requests=8)])
    values = dict(curve.points)
    assert [values[r] for r in range(9)] == [0, 0, 0, 0, 1, 1, 1, 2, 2]


def test_recall_curve_mean_and_time():
    curve = recall_curve(
        [
            create_mock_trace(discoveries=[3, 8], requests=8, victim=1),
            create_mock_trace(discoveries=[], requests=5, victim=2),
        ]
    )
    assert dict(curve.points)[8] == 1.0
    assert dict(curve.time_points)[4.0] == 1.0
    assert curve.time_points[-1] == (4.0, 1.0)


def test_short_traces_carry_their_final_count_forward():
    curve = recall_curve(
        [
            create_mock_trace(discoveries=[1], requests=1, victim=1),
            create_mock_trace(discoveries=[], requests=6, victim=2),
        ]
    )
    assert len(curve.points) == 7
    assert dict(curve.points)[6] == 0.5


def test_recall_curve_rejects_bad_input():
    with pytest.raises(ExperimentError):
        recall_curve([])
    with pytest.raises(ParamError):
        recall_curve(
            [
                create_mock_trace([1], 1, strategy_name="s1"),
                create_mock_trace([1], 1, strategy_name="s2"),
            ]
        )


def test_per_victim_best():
    rows = per_victim_best(
        {
            1: {"s1": 10, "s2": 10, "s3": 12, "s4": 40},
            2: {"s1": 0, "s2": 0, "s3": 0, "s4": 0},
            3: {"s1": 5, "s2": 5, "s3": 1, "s4": 2},
        }
    )
    assert [row.victim for row in rows] == [1, 3]
    assert rows[0].percentages == {"s1": 25.0, "s2": 25.0, "s3": 30.0, "s4": 100.0}
    assert rows[0].best == ("s4",)
    assert rows[1].best == ("s1", "s2")
    assert rows[1].percentages["s1"] == rows[1].percentages["s2"] == 100.0


def test_per_victim_best_rounds_to_one_decimal():
    rows = per_victim_best({1: {"s1": 1, "s4": 3}})
    assert rows[0].percentages["s1"] == 33.3


def test_build_report_ignores_completion_order():
    traces = [
        create_mock_trace([2], 3, strategy_name="s4", victim=2),
        create_mock_trace([1], 2, strategy_name="s1", victim=1),
        create_mock_trace([], 4, strategy_name="s4", victim=1),
        create_mock_trace([], 1, strategy_name="s1", victim=2),
    ]
    friend_counts = {1: 2, 2: 4}
    forward = build_report(traces, friend_counts, n_accounts=9)
    backward = build_report(list(reversed(traces)), friend_counts, n_accounts=9)
    assert report_summary(forward) == report_summary(backward)
    assert forward.strategies == ["s1", "s4"]
    assert forward.ledger_length == 10
    assert forward.mean_recall == {"s1": 0.25, "s4": 0.125}


def test_friendless_victims_are_left_out_of_mean_recall():
    report = build_report(
        [create_mock_trace([], 2, victim=1), create_mock_trace([], 2, victim=2)],
        {1: 0, 2: 0},
        n_accounts=1,
    )
    assert report.mean_recall == {"s4": None}
    assert report.recall_fractions("s4") == {1: None, 2: None}


# %% Experiments


def test_experiment_on_w1():
    report = run_experiment(
        ExperimentSpec(graph=fixtures.world_w1(), victims=(1,), strategies=("s1",))
    )
    assert [len(t.friends_found) for t in report.traces] == [2]
    assert report.ledger_length == 8
    assert report.victims_reached == {"s1": 1}
    assert report.recall_fractions("s1") == {1: 1.0}
    assert report.accounts == {a: 1 for a in range(8)} | {8: 0}


def test_experiment_default_victims_are_private_profiles():
    graph = fixtures.world_w1()
    assert select_victims(graph, "all-private", run_seed=0) == [1]
    assert select_victims(graph, "all", run_seed=0) == [1, 2, 3, 4, 5, 6]
    assert select_victims(graph, (3, 1, 3), run_seed=0) == [1, 3]
    picked = select_victims(graph, "random:3", run_seed=4)
    assert len(picked) == 3
    assert picked == select_victims(graph, "random:3", run_seed=4)


def test_experiment_spec_validation():
    with pytest.raises(ParamError):
        ExperimentSpec()
    with pytest.raises(ParamError):
        ExperimentSpec(graph=fixtures.world_w1(), gen_params=GenParams())
    with pytest.raises(ParamError):
        ExperimentSpec(graph=fixtures.world_w1(), strategies=("s9",))
    with pytest.raises(ParamError):
        ExperimentSpec(graph=fixtures.world_w1(), victims="some")
    with pytest.raises(ParamError):
        ExperimentSpec(graph=fixtures.world_w1(), n_accounts=0)
    with pytest.raises(ExperimentError):
        ExperimentSpec(graph=fixtures.world_w1(), strategies=())


def test_unknown_victims():
    with pytest.raises(ParamError, match="unknown victim ids"):
        run_experiment(ExperimentSpec(graph=fixtures.world_w1(), victims=(1, 42)))


def test_no_private_victims():
    graph = fixtures.assemble_graph(user_ids=[1, 2], friendships=[(1, 2)])
    with pytest.raises(ExperimentError):
        run_experiment(ExperimentSpec(graph=graph))


def test_ledger_matches_traces_and_accounts_are_balanced():
    report = run_experiment(
        ExperimentSpec(gen_params=GenParams(n_users=50), graph_seed=2, victims="all")
    )
    assert report.ledger_length == sum(t.requests for t in report.traces)
    loads = list(report.accounts.values())
    assert max(loads) - min(loads) <= 1
    assert sum(loads) == report.ledger_length


def test_parallel_jobs_give_the_same_report():
    def spec(jobs: int) -> ExperimentSpec:
        return ExperimentSpec(
            gen_params=GenParams(n_users=50),
            graph_seed=6,
            victims="all",
            strategies=("s1", "s2", "s3", "s4", "gasc", "gdesc"),
            strategy_config=StrategyConfig(budget=40, run_seed=3),
            jobs=jobs,
        )

    serial = run_experiment(spec(1))
    parallel = run_experiment(spec(4))
    assert report_summary(serial) == report_summary(parallel)
    assert serial.curves == parallel.curves
    assert serial.per_victim == parallel.per_victim


def test_crawling_over_http_matches_in_process():
    graph = fixtures.world_w1()
    in_process = run_experiment(ExperimentSpec(graph=graph, victims="all"))
    handle = spawn_http_server(graph, ServiceConfig())
    try:
        handle.service.get_liked_pages(0, 1)
        over_http = run_experiment(ExperimentSpec(service_url=handle.url, victims="all"))
    finally:
        handle.shutdown()
    assert report_summary(over_http) == report_summary(in_process)
    assert over_http.curves == in_process.curves


# %% Comparative findings on synthetic data


def test_public_profiles_dominate_mixed_ones():
    budget = StrategyConfig(budget=100)
    wins = {name: 0 for name in EVALUATED_STRATEGIES}
    mixed_requests = public_requests = 0
    for seed in range(20):
        reports = {}
        for fraction in (0.3, 1.0):
            reports[fraction] = run_experiment(
                ExperimentSpec(
                    gen_params=GenParams(n_users=60, fraction_public_profiles=fraction),
                    graph_seed=seed,
                    victims="all",
                    strategy_config=budget,
                )
            )
        mixed, public = reports[0.3], reports[1.0]
        for name in EVALUATED_STRATEGIES:
            wins[name] += public.mean_recall[name] >= mixed.mean_recall[name]
        mixed_requests += mixed.ledger_length
        public_requests += public.ledger_length
    assert all(count >= 18 for count in wins.values()), wins
    assert public_requests > mixed_requests


def test_pictures_beat_liked_pages_on_the_mixed_dataset():
    s4_wins = 0
    s4_recalls = []
    seeds_with_a_peak = 0
    for seed in range(20):
        report = run_experiment(
            ExperimentSpec(
                gen_params=GenParams(),
                graph_seed=seed,
                victims="all-private",
                strategy_config=StrategyConfig(run_seed=seed),
            )
        )
        recall = report.mean_recall
        s4_wins += all(recall["s4"] > recall[name] for name in ("s1", "s2", "s3"))
        s4_recalls.append(recall["s4"])
        fractions = report.recall_fractions("s4").values()
        seeds_with_a_peak += any(f is not None and f >= 0.7 for f in fractions)
    assert s4_wins >= 18
    assert 0.25 <= sum(s4_recalls) / len(s4_recalls) <= 0.60
    assert seeds_with_a_peak >= 10
