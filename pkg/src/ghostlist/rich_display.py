from rich.panel import Panel
from rich.table import Table

from ghostlist.checks import GraphViolation
from ghostlist.console import console, error_console
from ghostlist.harness import ExperimentReport
from ghostlist.strategies import STRATEGY_METADATA, Exposure
from ghostlist.world import GraphInfo


def print_command_title(s: str) -> None:
    console.print(f"\n[bold blue]{s}[/bold blue]")
    return None


def print_success(s: str) -> None:
    console.print(Panel(s, style="green", padding=(1, 2)))


def print_failure(s: str) -> None:
    error_console.print(Panel(s, style="red", padding=(1, 2)))


def display_violations(violations: list[GraphViolation], max_rows: int = 50) -> None:
    if not violations:
        print_success("The graph is consistent.")
        return None

    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Status", width=8)
    table.add_column("Rule", min_width=20)
    table.add_column("Entities")
    table.add_column("Details", style="dim", no_wrap=False)
    for violation in violations[:max_rows]:
        table.add_row(
            "[red]FAIL[/red]",
            violation.rule,
            ", ".join(str(e) for e in violation.entities),
            f"[red]{violation.details}[/red]" if violation.details else "",
        )
    console.print(table)
    if len(violations) > max_rows:
        console.print(f"[dim]... and {len(violations) - max_rows} more[/dim]")
    print_failure(f"The graph has {len(violations)} violations!")
    return None


def display_graph_info(info: GraphInfo) -> None:
    table = Table(show_header=False)
    table.add_column("Field", style="bold")
    table.add_column("Value", justify="right")
    table.add_row("users", str(info.n_users))
    table.add_row("pages", str(info.n_pages))
    table.add_row("groups", str(info.n_groups))
    table.add_row("pictures", str(info.n_pictures))
    table.add_row("mean degree", f"{info.mean_degree:.2f}")
    table.add_row("public profiles", f"{info.fraction_public:.1%}")
    table.add_row("friend lists hidden", f"{info.fraction_friends_hidden:.1%}")
    table.add_row("largest page", f"{info.largest_page_fan_count} fans")
    console.print(table)


def display_exposure(exposure: Exposure, recommendation: str) -> None:
    table = Table(show_header=False)
    table.add_column("Field", style="bold")
    table.add_column("Value", justify="right")
    table.add_row(
        "liked pages",
        str(exposure.n_liked_pages) if exposure.likes_visible else "[dim]hidden[/dim]",
    )
    table.add_row("public pictures", str(exposure.n_public_pictures))
    table.add_row(
        "listable groups",
        str(exposure.n_listable_groups) if exposure.groups_visible else "[dim]hidden[/dim]",
    )
    console.print(table)
    if recommendation == "none":
        print_failure(f"Victim {exposure.victim} exposes nothing a strategy can use.")
    else:
        name = STRATEGY_METADATA[recommendation]["name"]
        print_success(f"Recommended strategy for victim {exposure.victim}: {recommendation} ({name})")


def display_report(report: ExperimentReport) -> None:
    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Strategy")
    table.add_column("Victims", justify="right")
    table.add_column("Reached", justify="right")
    table.add_column("Mean recall", justify="right")
    table.add_column("Mean requests", justify="right")
    table.add_column("Budget hit", justify="right")
    for name in report.strategies:
        summary = report.summaries[name]
        table.add_row(
            f"{name} [dim]{STRATEGY_METADATA[name]['name']}[/dim]",
            str(summary.victims),
            str(summary.victims_reached),
            "n/a" if summary.mean_recall is None else f"{summary.mean_recall:.1%}",
            f"{summary.mean_requests:.1f}",
            str(summary.terminations["budget_reached"]),
        )
    console.print(table)
    console.print(
        f"[dim]{report.ledger_length} requests over {report.n_accounts} accounts[/dim]"
    )
