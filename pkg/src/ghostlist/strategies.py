"""
Friend-list recovery strategies.

Every strategy gathers candidate ids from something the victim leaves
public (liked pages, pictures, groups) and confirms each candidate through
the mutual content endpoint. Only a confirmed friendship ever enters
`friends_found`.
"""

from collections import deque
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any, Protocol, TypeVar, runtime_checkable

from ghostlist.config import StrategyConfig
from ghostlist.errors import AccessDenied, NotFound, ParamError, RateLimited
from ghostlist.seeding import derive_generator, derive_seed
from ghostlist.service import (
    FanSample,
    Hidden,
    MemberPage,
    MutualResult,
    ReactionSet,
)
from ghostlist.world import GroupVisibility, SocialGraph

T = TypeVar("T")


class Termination(StrEnum):
    EXHAUSTED = "exhausted"
    BUDGET_REACHED = "budget_reached"
    NOTHING_ACCESSIBLE = "nothing_accessible"


@runtime_checkable
class CrawlOracle(Protocol):
    """The oracle as a strategy sees it: accounts are chosen by the caller's scheduler."""

    @property
    def latency(self) -> float: ...

    def get_liked_pages(self, user_id: int) -> frozenset[int] | Hidden: ...

    def facepile(self, page_id: int, call_seed: int) -> FanSample: ...

    def mutual_content(self, a: int, b: int) -> MutualResult: ...

    def get_public_pictures(self, user_id: int) -> frozenset[int]: ...

    def get_picture_reactions(self, picture_id: int) -> ReactionSet: ...

    def get_groups(self, user_id: int) -> frozenset[int] | Hidden: ...

    def get_group_members(self, group_id: int, page_index: int) -> MemberPage: ...


# %% Traces


@dataclass(frozen=True)
class TraceEvent:
    no: int
    t: float
    kind: str
    data: dict[str, Any]


@dataclass
class CrawlTrace:
    victim: int
    strategy_name: str
    latency: float
    events: list[TraceEvent] = field(default_factory=list)
    friends_found: frozenset[int] = frozenset()
    terminated_reason: Termination = Termination.EXHAUSTED
    requests: int = 0

    def discoveries(self) -> list[int]:
        """Request numbers at which each friend was confirmed, in order."""
        return [event.no for event in self.events if event.kind == "friend"]

    def found_by(self, request_no: int) -> int:
        return sum(1 for no in self.discoveries() if no <= request_no)


class _BudgetReached(Exception):
    pass


class _Crawl:
    """Bookkeeping for one strategy run: request numbering, budget, verification."""

    def __init__(
        self, victim: int, strategy_name: str, oracle: CrawlOracle, cfg: StrategyConfig
    ):
        self.victim = victim
        self.oracle = oracle
        self.cfg = cfg
        self.trace = CrawlTrace(
            victim=victim, strategy_name=strategy_name, latency=oracle.latency
        )
        self.found: set[int] = set()
        self.checked: set[int] = set()

    def _log(self, kind: str, data: dict[str, Any]) -> None:
        no = self.trace.requests
        self.trace.events.append(
            TraceEvent(no=no, t=no * self.trace.latency, kind=kind, data=data)
        )

    def request(
        self,
        kind: str,
        call: Callable[[], T],
        data: dict[str, Any],
        summarize: Callable[[T], dict[str, Any]] | None = None,
    ) -> T:
        while True:
            if self.cfg.budget is not None and self.trace.requests >= self.cfg.budget:
                raise _BudgetReached
            self.trace.requests += 1
            try:
                result = call()
            except RateLimited:
                self._log("rate_limited", {"endpoint": kind, **data})
                continue
            except AccessDenied:
                self._log("denied", {"endpoint": kind, **data})
                raise
            self._log(kind, {**data, **(summarize(result) if summarize else {})})
            return result

    def verify_all(self, candidates: Iterable[int]) -> None:
        """Confirm candidates in ascending id order, each at most once per run."""
        queue = deque(sorted(set(candidates)))
        queued = set(queue)
        while queue:
            candidate = queue.popleft()
            if candidate == self.victim or candidate in self.checked:
                continue
            self.checked.add(candidate)
            result = self.request(
                "mutual",
                lambda: self.oracle.mutual_content(self.victim, candidate),
                {"user": candidate},
                summarize=lambda r: {"are_friends": r.are_friends},
            )
            if not result.are_friends:
                continue
            self.found.add(candidate)
            self._log("friend", {"user": candidate})
            if self.cfg.expand_mutuals:
                for mutual in sorted(result.mutual_friends):
                    if mutual not in queued and mutual not in self.checked:
                        queued.add(mutual)
                        queue.append(mutual)

    def finish(self, reason: Termination) -> CrawlTrace:
        self.trace.friends_found = frozenset(self.found)
        self.trace.terminated_reason = reason
        return self.trace


# %% Page strategies


def facepile_call_seed(
    strategy_name: str, run_seed: int, victim: int, page_id: int, call_index: int
) -> int:
    return derive_seed(strategy_name, run_seed, victim, page_id, call_index)


def _run_page_strategy(
    strategy_name: str, victim: int, oracle: CrawlOracle, cfg: StrategyConfig
) -> CrawlTrace:
    crawl = _Crawl(victim=victim, strategy_name=strategy_name, oracle=oracle, cfg=cfg)
    try:
        pages = crawl.request(
            "likes",
            lambda: oracle.get_liked_pages(victim),
            {"user": victim},
            summarize=lambda r: (
                {"hidden": True} if isinstance(r, Hidden) else {"pages": len(r)}
            ),
        )
        if isinstance(pages, Hidden):
            return crawl.finish(Termination.NOTHING_ACCESSIBLE)

        fetch_order = sorted(pages)
        if strategy_name == "s1":
            rng = derive_generator("s1-order", cfg.run_seed, victim)
            fetch_order = [fetch_order[int(i)] for i in rng.permutation(len(fetch_order))]

        fans: dict[int, set[int]] = {}
        totals: dict[int, int] = {}
        for page_id in fetch_order:
            fans[page_id] = set()
            for call_index in range(cfg.facepile_calls_per_page):
                call_seed = facepile_call_seed(
                    strategy_name, cfg.run_seed, victim, page_id, call_index
                )
                sample = crawl.request(
                    "facepile",
                    lambda: oracle.facepile(page_id, call_seed),
                    {"page": page_id},
                    summarize=lambda r: {
                        "sampled": len(r.sampled_fans),
                        "total": r.total_fan_count,
                    },
                )
                fans[page_id] |= sample.sampled_fans
                totals[page_id] = sample.total_fan_count

        match strategy_name:
            case "s2":
                batch_order = sorted(fetch_order, key=lambda p: (totals[p], p))
            case "s3":
                batch_order = sorted(fetch_order, key=lambda p: (-totals[p], p))
            case _:
                batch_order = fetch_order

        for page_id in batch_order:
            crawl.verify_all(fans[page_id])
        return crawl.finish(Termination.EXHAUSTED)
    except _BudgetReached:
        return crawl.finish(Termination.BUDGET_REACHED)


def s1_likes_random(victim: int, oracle: CrawlOracle, cfg: StrategyConfig) -> CrawlTrace:
    """Liked pages in a seeded random order."""
    return _run_page_strategy("s1", victim, oracle, cfg)


def s2_likes_ascending(
    victim: int, oracle: CrawlOracle, cfg: StrategyConfig
) -> CrawlTrace:
    """Liked pages from the fewest fans to the most."""
    return _run_page_strategy("s2", victim, oracle, cfg)


def s3_likes_descending(
    victim: int, oracle: CrawlOracle, cfg: StrategyConfig
) -> CrawlTrace:
    """Liked pages from the most fans to the fewest."""
    return _run_page_strategy("s3", victim, oracle, cfg)


# %% Picture strategy


def s4_pictures(victim: int, oracle: CrawlOracle, cfg: StrategyConfig) -> CrawlTrace:
    """Likes and comments on the victim's public pictures, cover photos included."""
    crawl = _Crawl(victim=victim, strategy_name="s4", oracle=oracle, cfg=cfg)
    try:
        pictures = crawl.request(
            "pictures",
            lambda: oracle.get_public_pictures(victim),
            {"user": victim},
            summarize=lambda r: {"pictures": len(r)},
        )
        candidates: set[int] = set()
        for picture_id in sorted(pictures):
            reactions = crawl.request(
                "reactions",
                lambda: oracle.get_picture_reactions(picture_id),
                {"picture": picture_id},
                summarize=lambda r: {
                    "likers": len(r.likers),
                    "commenters": len(r.commenters),
                },
            )
            candidates |= reactions.likers | reactions.commenters
        crawl.verify_all(candidates)
        return crawl.finish(Termination.EXHAUSTED)
    except _BudgetReached:
        return crawl.finish(Termination.BUDGET_REACHED)


# %% Group strategies


def _run_group_strategy(
    strategy_name: str,
    victim: int,
    oracle: CrawlOracle,
    cfg: StrategyConfig,
    largest_first: bool,
) -> CrawlTrace:
    crawl = _Crawl(victim=victim, strategy_name=strategy_name, oracle=oracle, cfg=cfg)
    try:
        groups = crawl.request(
            "groups",
            lambda: oracle.get_groups(victim),
            {"user": victim},
            summarize=lambda r: (
                {"hidden": True} if isinstance(r, Hidden) else {"groups": len(r)}
            ),
        )
        if isinstance(groups, Hidden):
            return crawl.finish(Termination.NOTHING_ACCESSIBLE)

        first_pages: dict[int, MemberPage] = {}
        for group_id in sorted(groups):
            try:
                first_pages[group_id] = crawl.request(
                    "members",
                    lambda: oracle.get_group_members(group_id, 0),
                    {"group": group_id, "page": 0},
                    summarize=lambda r: {"members": len(r.members), "total": r.total},
                )
            except AccessDenied:
                continue

        sign = -1 if largest_first else 1
        for group_id in sorted(
            first_pages, key=lambda g: (sign * first_pages[g].total, g)
        ):
            page = first_pages[group_id]
            members = list(page.members)
            while page.has_more:
                next_index = page.page_index + 1
                page = crawl.request(
                    "members",
                    lambda: oracle.get_group_members(group_id, next_index),
                    {"group": group_id, "page": next_index},
                    summarize=lambda r: {"members": len(r.members), "total": r.total},
                )
                members.extend(page.members)
            crawl.verify_all(members)
        return crawl.finish(Termination.EXHAUSTED)
    except _BudgetReached:
        return crawl.finish(Termination.BUDGET_REACHED)


def group_ascending(victim: int, oracle: CrawlOracle, cfg: StrategyConfig) -> CrawlTrace:
    return _run_group_strategy("gasc", victim, oracle, cfg, largest_first=False)


def group_descending(
    victim: int, oracle: CrawlOracle, cfg: StrategyConfig
) -> CrawlTrace:
    return _run_group_strategy("gdesc", victim, oracle, cfg, largest_first=True)


# %% Registry


class StrategyFn(Protocol):
    def __call__(
        self, victim: int, oracle: CrawlOracle, cfg: StrategyConfig
    ) -> CrawlTrace: ...


AVAILABLE_STRATEGIES: dict[str, StrategyFn] = {
    "s1": s1_likes_random,
    "s2": s2_likes_ascending,
    "s3": s3_likes_descending,
    "s4": s4_pictures,
    "gasc": group_ascending,
    "gdesc": group_descending,
}

PAGE_STRATEGIES = ("s1", "s2", "s3")
GROUP_STRATEGIES = ("gasc", "gdesc")
EVALUATED_STRATEGIES = ("s1", "s2", "s3", "s4")

STRATEGY_METADATA = {
    "s1": {"name": "Likes Random Order", "source": "liked pages"},
    "s2": {"name": "Likes Ascending Order", "source": "liked pages"},
    "s3": {"name": "Likes Descending Order", "source": "liked pages"},
    "s4": {"name": "Likes and Comments", "source": "pictures"},
    "gasc": {"name": "Groups Smallest First", "source": "groups"},
    "gdesc": {"name": "Groups Largest First", "source": "groups"},
}


def get_strategy(name: str) -> StrategyFn:
    if name not in AVAILABLE_STRATEGIES:
        raise ParamError(
            f"invalid strategy chosen. It should be one of {list(AVAILABLE_STRATEGIES)}, and you chose {name}."
        )
    return AVAILABLE_STRATEGIES[name]


# %% Ground truth


def true_friends(victim: int, graph: SocialGraph) -> frozenset[int]:
    if victim not in graph.users:
        raise NotFound(f"unknown user {victim}")
    return graph.friends_of(victim)


def reachable_friends_upper_bound(
    victim: int, graph: SocialGraph, strategy_name: str
) -> frozenset[int]:
    """
    Friends a strategy could find with unlimited budget and exhaustive
    sampling, computed straight from the ground truth.
    """
    friends = true_friends(victim, graph)
    user = graph.users[victim]
    reachable: set[int] = set()

    if strategy_name in PAGE_STRATEGIES:
        if user.privacy.likes_visible:
            for page_id in user.likes:
                reachable |= graph.pages[page_id].fans
    elif strategy_name == "s4":
        for picture_id in graph.public_pictures_of(victim):
            reachable |= graph.pictures[picture_id].reactors
    elif strategy_name in GROUP_STRATEGIES:
        if user.privacy.groups_visible:
            for group_id in user.groups:
                group = graph.groups[group_id]
                if group.visibility == GroupVisibility.PUBLIC:
                    reachable |= group.members
    else:
        get_strategy(strategy_name)

    return friends & frozenset(reachable)


# %% Exposure


@dataclass(frozen=True)
class Exposure:
    victim: int
    likes_visible: bool
    n_liked_pages: int
    n_public_pictures: int
    groups_visible: bool
    n_listable_groups: int


def probe_exposure(victim: int, oracle: CrawlOracle) -> Exposure:
    """Three requests telling which strategies have anything to work with."""
    likes = oracle.get_liked_pages(victim)
    pictures = oracle.get_public_pictures(victim)
    groups = oracle.get_groups(victim)
    return Exposure(
        victim=victim,
        likes_visible=not isinstance(likes, Hidden),
        n_liked_pages=0 if isinstance(likes, Hidden) else len(likes),
        n_public_pictures=len(pictures),
        groups_visible=not isinstance(groups, Hidden),
        n_listable_groups=0 if isinstance(groups, Hidden) else len(groups),
    )


def recommend_strategy(exposure: Exposure) -> str:
    # a lone public picture is usually just the cover photo
    if exposure.n_public_pictures > 1:
        return "s4"
    if exposure.likes_visible and exposure.n_liked_pages > 0:
        return "s3"
    if exposure.n_public_pictures > 0:
        return "s4"
    if exposure.n_listable_groups > 0:
        return "gasc"
    return "none"
