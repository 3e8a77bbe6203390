"""
Ground-truth social world: users, pages, groups and pictures.

A SocialGraph is never mutated after construction. Hand-made variations for
tests go through `dataclasses.replace`.
"""

from dataclasses import dataclass, field
from enum import StrEnum

UserId = int
PageId = int
GroupId = int
PictureId = int


class GroupVisibility(StrEnum):
    PUBLIC = "public"
    PRIVATE = "private"
    HIDDEN = "hidden"


@dataclass(frozen=True)
class PrivacySettings:
    friends_visible: bool = True
    likes_visible: bool = True
    pictures_visible: bool = True
    groups_visible: bool = True

    @property
    def is_public(self) -> bool:
        return (
            self.friends_visible
            and self.likes_visible
            and self.pictures_visible
            and self.groups_visible
        )


PUBLIC_PROFILE = PrivacySettings()


@dataclass(frozen=True)
class User:
    id: UserId
    friends: frozenset[UserId] = frozenset()
    likes: frozenset[PageId] = frozenset()
    groups: frozenset[GroupId] = frozenset()
    pictures: tuple[PictureId, ...] = ()
    privacy: PrivacySettings = PUBLIC_PROFILE


@dataclass(frozen=True)
class Page:
    id: PageId
    fans: frozenset[UserId] = frozenset()


@dataclass(frozen=True)
class Group:
    id: GroupId
    members: frozenset[UserId] = frozenset()
    visibility: GroupVisibility = GroupVisibility.PUBLIC


@dataclass(frozen=True)
class Picture:
    id: PictureId
    owner: UserId
    is_cover: bool = False
    likers: frozenset[UserId] = frozenset()
    commenters: frozenset[UserId] = frozenset()

    @property
    def reactors(self) -> frozenset[UserId]:
        return self.likers | self.commenters


@dataclass(frozen=True)
class SocialGraph:
    users: dict[UserId, User] = field(default_factory=dict)
    pages: dict[PageId, Page] = field(default_factory=dict)
    groups: dict[GroupId, Group] = field(default_factory=dict)
    pictures: dict[PictureId, Picture] = field(default_factory=dict)
    generation_seed: int = 0

    def friends_of(self, user_id: UserId) -> frozenset[UserId]:
        return self.users[user_id].friends

    def are_friends(self, a: UserId, b: UserId) -> bool:
        return b in self.users[a].friends

    def public_pictures_of(self, user_id: UserId) -> tuple[PictureId, ...]:
        """Pictures anyone can see: all of them when visible, else only covers."""
        user = self.users[user_id]
        if user.privacy.pictures_visible:
            return user.pictures
        return tuple(pid for pid in user.pictures if self.pictures[pid].is_cover)

    def listable_groups_of(self, user_id: UserId) -> frozenset[GroupId]:
        return frozenset(
            gid
            for gid in self.users[user_id].groups
            if self.groups[gid].visibility != GroupVisibility.HIDDEN
        )


@dataclass
class GraphInfo:
    n_users: int
    n_pages: int
    n_groups: int
    n_pictures: int
    mean_degree: float
    fraction_public: float
    fraction_friends_hidden: float
    largest_page_fan_count: int


def summarize_graph(graph: SocialGraph) -> GraphInfo:
    n_users = len(graph.users)
    degrees = [len(user.friends) for user in graph.users.values()]
    return GraphInfo(
        n_users=n_users,
        n_pages=len(graph.pages),
        n_groups=len(graph.groups),
        n_pictures=len(graph.pictures),
        mean_degree=sum(degrees) / n_users if n_users else 0.0,
        fraction_public=(
            sum(user.privacy.is_public for user in graph.users.values()) / n_users
            if n_users
            else 0.0
        ),
        fraction_friends_hidden=(
            sum(not user.privacy.friends_visible for user in graph.users.values())
            / n_users
            if n_users
            else 0.0
        ),
        largest_page_fan_count=max(
            (len(page.fans) for page in graph.pages.values()), default=0
        ),
    )
