# %%

from pathlib import Path
from typing import Annotated, NoReturn

import requests
import typer

from ghostlist import config, rich_display
from ghostlist.checks import validate_graph
from ghostlist.config import ServiceConfig, StrategyConfig
from ghostlist.console import console
from ghostlist.errors import GhostlistError
from ghostlist.fixtures import FIXTURE_WORLDS
from ghostlist.generator import generate_graph
from ghostlist.graph_io import load_graph, save_graph
from ghostlist.harness import AccountPool, ExperimentSpec, run_experiment
from ghostlist.reports import export_report, recompute_report
from ghostlist.server import spawn_http_server
from ghostlist.service import OsnService
from ghostlist.strategies import (
    AVAILABLE_STRATEGIES,
    EVALUATED_STRATEGIES,
    probe_exposure,
    recommend_strategy,
)
from ghostlist.world import SocialGraph, summarize_graph

# initialize typer app
app = typer.Typer(no_args_is_help=True)

RUNTIME_FAILURES = (GhostlistError, OSError, requests.RequestException)

SeedOption = Annotated[
    int,
    typer.Option(envvar=config.SEED_ENV_VAR, help="Seed for every random choice."),
]
GraphOption = Annotated[Path, typer.Option("--graph", help="Graph JSON file.")]


def _abort(e: Exception) -> NoReturn:
    rich_display.print_failure(f"{type(e).__name__}: {e}")
    raise typer.Exit(1)


def _load_graph_or_abort(path: Path) -> SocialGraph:
    try:
        return load_graph(path)
    except RUNTIME_FAILURES as e:
        _abort(e)


def parse_strategies(value: str) -> tuple[str, ...]:
    """'all' for the four evaluated strategies, or a comma separated list."""
    if value == "all":
        return EVALUATED_STRATEGIES
    names = tuple(name.strip() for name in value.split(",") if name.strip())
    unknown = [name for name in names if name not in AVAILABLE_STRATEGIES]
    if not names or unknown:
        raise typer.BadParameter(
            f"It should be 'all' or a list of {list(AVAILABLE_STRATEGIES)}, and you chose {value}."
        )
    return names


def parse_victims(value: str) -> str | tuple[int, ...]:
    if value in ("all", "all-private") or value.startswith("random:"):
        return value
    try:
        return tuple(int(v) for v in value.split(","))
    except ValueError:
        raise typer.BadParameter(
            f"It should be 'all', 'all-private', 'random:K' or a list of ids, and you chose {value}."
        ) from None


# %% Graphs


@app.command()
def generate(
    out: Annotated[Path, typer.Option(help="Where to write the graph JSON.")],
    preset: Annotated[str, typer.Option(help="Dataset preset: mixed or public.")] = "mixed",
    users: Annotated[int | None, typer.Option(help="Override the number of users.")] = None,
    fraction_public: Annotated[
        float | None, typer.Option(help="Override the fraction of public profiles.")
    ] = None,
    fixture: Annotated[
        str | None, typer.Option(help="Write a hand-built world (w1, w2 or w3) instead.")
    ] = None,
    seed: SeedOption = config.DEFAULT_SEED,
) -> None:
    """Generate a synthetic social graph."""
    if fixture is not None:
        if fixture not in FIXTURE_WORLDS:
            raise typer.BadParameter(
                f"It should be one of {sorted(FIXTURE_WORLDS)}, and you chose {fixture}."
            )
        title = f"Writing the hand-built world {fixture}"
    else:
        try:
            params = config.get_preset(preset)
            if users is not None:
                params.set_params(n_users=users)
            if fraction_public is not None:
                params.set_params(fraction_public_profiles=fraction_public)
        except GhostlistError as e:
            raise typer.BadParameter(str(e)) from None
        title = f"Generating the {preset} dataset (seed {seed})"

    rich_display.print_command_title(title)
    try:
        graph = (
            FIXTURE_WORLDS[fixture]() if fixture is not None else generate_graph(params, seed)
        )
        save_graph(graph, out)
    except RUNTIME_FAILURES as e:
        _abort(e)
    rich_display.display_graph_info(summarize_graph(graph))
    rich_display.print_success(f"Graph written to {out}")
    return None


@app.command()
def check(graph_path: GraphOption) -> None:
    """Validate the cross-references of a graph file."""
    rich_display.print_command_title("Graph consistency")
    violations = validate_graph(_load_graph_or_abort(graph_path))
    rich_display.display_violations(violations)
    if violations:
        raise typer.Exit(1)
    return None


@app.command()
def info(graph_path: GraphOption) -> None:
    """Summary statistics of a graph file."""
    rich_display.print_command_title(f"Graph {graph_path}")
    rich_display.display_graph_info(summarize_graph(_load_graph_or_abort(graph_path)))
    return None


# %% Service


@app.command()
def serve(
    graph_path: GraphOption,
    host: Annotated[str, typer.Option()] = "127.0.0.1",
    port: Annotated[int, typer.Option()] = config.DEFAULT_HTTP_PORT,
    sample_size: Annotated[int, typer.Option()] = config.DEFAULT_SAMPLE_SIZE,
    latency: Annotated[float, typer.Option()] = config.DEFAULT_LATENCY,
    rate_limit: Annotated[
        float | None, typer.Option(help="Requests per simulated second per account.")
    ] = None,
) -> None:
    """Serve a graph over HTTP until interrupted."""
    graph = _load_graph_or_abort(graph_path)
    try:
        service_config = ServiceConfig(
            sample_size=sample_size, latency=latency, rate_limit=rate_limit
        )
        handle = spawn_http_server(
            graph=graph, config=service_config, host=host, port=port, quiet=False
        )
    except RUNTIME_FAILURES as e:
        _abort(e)

    console.print(f"Serving {len(graph.users)} users on [bold]{handle.url}[/bold]")
    console.print("Press Ctrl+C to stop.")
    handle.serve_until_stopped()
    console.print("Server stopped.")
    return None


@app.command()
def probe(
    graph_path: GraphOption,
    victim: Annotated[int, typer.Option(help="User id to probe.")],
) -> None:
    """Show what a victim exposes and which strategy suits them."""
    graph = _load_graph_or_abort(graph_path)
    rich_display.print_command_title(f"Exposure of victim {victim}")
    try:
        exposure = probe_exposure(victim, AccountPool(OsnService(graph), n_accounts=1))
    except RUNTIME_FAILURES as e:
        _abort(e)
    rich_display.display_exposure(exposure, recommend_strategy(exposure))
    return None


# %% Experiments


@app.command()
def crawl(
    out: Annotated[Path, typer.Option(help="Directory for the report and traces.")],
    graph_path: Annotated[
        Path | None, typer.Option("--graph", help="Crawl an in-process service over this graph.")
    ] = None,
    url: Annotated[
        str | None, typer.Option(help="Crawl a running `ghostlist serve` instance.")
    ] = None,
    strategy: Annotated[str, typer.Option(help="'all' or a comma separated list.")] = "all",
    victims: Annotated[
        str, typer.Option(help="all, all-private, random:K or a comma separated list.")
    ] = "all-private",
    budget: Annotated[int | None, typer.Option(help="Requests per strategy run.")] = None,
    accounts: Annotated[int, typer.Option()] = config.DEFAULT_N_ACCOUNTS,
    seed: SeedOption = config.DEFAULT_SEED,
    latency: Annotated[float, typer.Option()] = config.DEFAULT_LATENCY,
    sample_size: Annotated[int, typer.Option()] = config.DEFAULT_SAMPLE_SIZE,
    facepile_calls: Annotated[int, typer.Option(help="FacePile calls per page.")] = 1,
    expand_mutuals: Annotated[bool, typer.Option()] = False,
    jobs: Annotated[int, typer.Option(help="Victims crawled in parallel.")] = 1,
) -> None:
    """Run strategies against victims and write the report."""
    if (graph_path is None) == (url is None):
        raise typer.BadParameter("Give exactly one of --graph and --url.")
    strategies = parse_strategies(strategy)
    victim_selection = parse_victims(victims)

    try:
        spec = ExperimentSpec(
            graph=_load_graph_or_abort(graph_path) if graph_path is not None else None,
            service_url=url,
            victims=victim_selection,
            strategies=strategies,
            strategy_config=StrategyConfig(
                budget=budget,
                expand_mutuals=expand_mutuals,
                facepile_calls_per_page=facepile_calls,
                run_seed=seed,
            ),
            service_config=ServiceConfig(sample_size=sample_size, latency=latency),
            n_accounts=accounts,
            output_dir=out,
            jobs=jobs,
        )
    except GhostlistError as e:
        raise typer.BadParameter(str(e)) from None

    rich_display.print_command_title(f"Crawling with {', '.join(strategies)}")
    try:
        experiment_report = run_experiment(spec, verbose=True)
    except RUNTIME_FAILURES as e:
        _abort(e)
    rich_display.display_report(experiment_report)
    rich_display.print_success(f"Report written to {out}")
    return None


@app.command()
def report(
    in_dir: Annotated[Path, typer.Option("--in", help="Crawl output or traces directory.")],
    out: Annotated[
        Path | None, typer.Option(help="Where to write the report; defaults to --in.")
    ] = None,
) -> None:
    """Recompute the report from stored traces."""
    rich_display.print_command_title(f"Recomputing the report from {in_dir}")
    try:
        recomputed = recompute_report(in_dir)
        export_report(recomputed, out if out is not None else in_dir)
    except RUNTIME_FAILURES as e:
        _abort(e)
    rich_display.display_report(recomputed)
    rich_display.print_success("Report recomputed")
    return None


@app.callback()
def main() -> None:
    """
    Recover hidden friend lists on a simulated social network.
    """
    return None
