"""
In-process social network service.

The ground-truth graph is reachable only through the public primitives below.
Every call, successful or not, takes one ledger entry and advances the
simulated clock by one latency step.
"""

import threading
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Protocol, runtime_checkable

from ghostlist.config import ServiceConfig
from ghostlist.errors import AccessDenied, NotFound, RateLimited, SelfQuery
from ghostlist.seeding import derive_generator, derive_seed
from ghostlist.world import (
    Group,
    GroupVisibility,
    Page,
    Picture,
    SocialGraph,
    User,
)

FIRST_FRIENDSHIP_DATE = date(2006, 9, 26)
LAST_FRIENDSHIP_DATE = date(2013, 12, 31)


# %% Responses


@dataclass(frozen=True)
class Hidden:
    """Returned instead of data the user's privacy settings keep from strangers."""


HIDDEN = Hidden()


@dataclass(frozen=True)
class FanSample:
    page: int
    sampled_fans: frozenset[int]
    total_fan_count: int


@dataclass(frozen=True)
class MutualResult:
    are_friends: bool
    friends_since: date | None
    mutual_friends: frozenset[int]


@dataclass(frozen=True)
class ReactionSet:
    picture: int
    likers: frozenset[int]
    commenters: frozenset[int]


@dataclass(frozen=True)
class MemberPage:
    group: int
    page_index: int
    members: tuple[int, ...]
    total: int
    has_more: bool


# %% Oracle interface


@runtime_checkable
class Oracle(Protocol):
    """
    The seven public primitives a crawler may use. Implemented in-process by
    OsnService and over HTTP by client.HttpOracle.
    """

    @property
    def latency(self) -> float: ...

    def get_liked_pages(self, account_id: int, user_id: int) -> frozenset[int] | Hidden: ...

    def facepile(self, account_id: int, page_id: int, call_seed: int) -> FanSample: ...

    def mutual_content(self, account_id: int, a: int, b: int) -> MutualResult: ...

    def get_public_pictures(self, account_id: int, user_id: int) -> frozenset[int]: ...

    def get_picture_reactions(self, account_id: int, picture_id: int) -> ReactionSet: ...

    def get_groups(self, account_id: int, user_id: int) -> frozenset[int] | Hidden: ...

    def get_group_members(
        self, account_id: int, group_id: int, page_index: int
    ) -> MemberPage: ...


# %% Accounting


@dataclass(frozen=True)
class LedgerEntry:
    sequence_no: int
    account_id: int
    endpoint: str
    timestamp: float


class TokenBucket:
    """Token bucket refilled against the simulated clock rather than wall time."""

    def __init__(self, tokens_per_second: float, burst: int):
        self.tokens_per_second = tokens_per_second
        self.burst = burst
        self._tokens = float(burst)
        self._last_refill = 0.0

    def try_acquire(self, now: float, amount: int = 1) -> bool:
        elapsed = max(0.0, now - self._last_refill)
        self._last_refill = max(self._last_refill, now)
        self._tokens = min(self.burst, self._tokens + elapsed * self.tokens_per_second)
        if self._tokens >= amount:
            self._tokens -= amount
            return True
        return False


@dataclass
class Account:
    account_id: int
    requests_issued: int = 0
    rate_limit: float | None = None
    bucket: TokenBucket | None = field(default=None, repr=False)


# %% Service


class OsnService:
    def __init__(self, graph: SocialGraph, config: ServiceConfig | None = None):
        self.graph = graph
        self.config = config if config is not None else ServiceConfig()
        self.ledger: list[LedgerEntry] = []
        self.accounts: dict[int, Account] = {}
        self.clock = 0.0
        self._lock = threading.Lock()

    @property
    def latency(self) -> float:
        return self.config.latency

    def get_account(self, account_id: int) -> Account:
        with self._lock:
            return self._get_account_locked(account_id)

    def _get_account_locked(self, account_id: int) -> Account:
        if account_id not in self.accounts:
            rate_limit = self.config.rate_limit
            self.accounts[account_id] = Account(
                account_id=account_id,
                rate_limit=rate_limit,
                bucket=(
                    TokenBucket(tokens_per_second=rate_limit, burst=self.config.burst)
                    if rate_limit is not None
                    else None
                ),
            )
        return self.accounts[account_id]

    def requests_by_account(self) -> dict[int, int]:
        with self._lock:
            return {
                account_id: account.requests_issued
                for account_id, account in sorted(self.accounts.items())
            }

    def _record(self, account_id: int, endpoint: str) -> None:
        with self._lock:
            account = self._get_account_locked(account_id)
            now = self.clock
            self.ledger.append(
                LedgerEntry(
                    sequence_no=len(self.ledger) + 1,
                    account_id=account_id,
                    endpoint=endpoint,
                    timestamp=now,
                )
            )
            account.requests_issued += 1
            self.clock += self.config.latency
            if account.bucket is not None and not account.bucket.try_acquire(now=now):
                raise RateLimited(
                    f"account {account_id} exceeded {account.rate_limit} requests per simulated second"
                )

    # lookups

    def _user(self, user_id: int) -> User:
        user = self.graph.users.get(user_id)
        if user is None:
            raise NotFound(f"unknown user {user_id}")
        return user

    def _page(self, page_id: int) -> Page:
        page = self.graph.pages.get(page_id)
        if page is None:
            raise NotFound(f"unknown page {page_id}")
        return page

    def _picture(self, picture_id: int) -> Picture:
        picture = self.graph.pictures.get(picture_id)
        if picture is None:
            raise NotFound(f"unknown picture {picture_id}")
        return picture

    def _group(self, group_id: int) -> Group:
        group = self.graph.groups.get(group_id)
        if group is None:
            raise NotFound(f"unknown group {group_id}")
        return group

    # endpoints

    def get_liked_pages(self, account_id: int, user_id: int) -> frozenset[int] | Hidden:
        self._record(account_id, "likes")
        user = self._user(user_id)
        if not user.privacy.likes_visible:
            return HIDDEN
        return user.likes

    def facepile(self, account_id: int, page_id: int, call_seed: int) -> FanSample:
        self._record(account_id, "facepile")
        page = self._page(page_id)
        fans = sorted(page.fans)
        size = min(self.config.sample_size, len(fans))
        rng = derive_generator(self.graph.generation_seed, page_id, call_seed)
        picked = rng.choice(len(fans), size=size, replace=False) if size else []
        return FanSample(
            page=page_id,
            sampled_fans=frozenset(fans[int(i)] for i in picked),
            total_fan_count=len(fans),
        )

    def mutual_content(self, account_id: int, a: int, b: int) -> MutualResult:
        self._record(account_id, "mutual")
        if a == b:
            raise SelfQuery(f"mutual content of user {a} with itself")
        user_a = self._user(a)
        user_b = self._user(b)
        are_friends = b in user_a.friends
        return MutualResult(
            are_friends=are_friends,
            friends_since=(
                friends_since(self.graph.generation_seed, a, b) if are_friends else None
            ),
            mutual_friends=user_a.friends & user_b.friends,
        )

    def get_public_pictures(self, account_id: int, user_id: int) -> frozenset[int]:
        self._record(account_id, "pictures")
        self._user(user_id)
        return frozenset(self.graph.public_pictures_of(user_id))

    def get_picture_reactions(self, account_id: int, picture_id: int) -> ReactionSet:
        self._record(account_id, "reactions")
        picture = self._picture(picture_id)
        return ReactionSet(
            picture=picture_id, likers=picture.likers, commenters=picture.commenters
        )

    def get_groups(self, account_id: int, user_id: int) -> frozenset[int] | Hidden:
        self._record(account_id, "groups")
        user = self._user(user_id)
        if not user.privacy.groups_visible:
            return HIDDEN
        return self.graph.listable_groups_of(user_id)

    def get_group_members(
        self, account_id: int, group_id: int, page_index: int
    ) -> MemberPage:
        self._record(account_id, "members")
        group = self._group(group_id)
        if group.visibility != GroupVisibility.PUBLIC:
            raise AccessDenied(f"group {group_id} is {group.visibility.value}")
        members = sorted(group.members)
        page_size = self.config.group_page_size
        start = page_index * page_size
        return MemberPage(
            group=group_id,
            page_index=page_index,
            members=tuple(members[start : start + page_size]) if page_index >= 0 else (),
            total=len(members),
            has_more=0 <= page_index and start + page_size < len(members),
        )


def friends_since(graph_seed: int, a: int, b: int) -> date:
    span = (LAST_FRIENDSHIP_DATE - FIRST_FRIENDSHIP_DATE).days
    offset = derive_seed(graph_seed, "since", min(a, b), max(a, b)) % (span + 1)
    return FIRST_FRIENDSHIP_DATE + timedelta(days=offset)
