"""
Hand-built worlds used throughout the tests and the CLI demos.

W1: victim 1 likes pages A and B, friends {2, 3}.
W2: victim 1 hides pictures but has a cover photo liked by {2, 4}, commented by {3}.
W3: victim 1 is in a public group {1, 2, 7}, a private group and a hidden group.
"""

from collections.abc import Iterable, Mapping
from dataclasses import replace

from ghostlist.world import (
    PUBLIC_PROFILE,
    Group,
    GroupVisibility,
    Page,
    Picture,
    PrivacySettings,
    SocialGraph,
    User,
)

VICTIM = 1
PAGE_A = 1
PAGE_B = 2
COVER_PHOTO = 1
PUBLIC_GROUP = 1
PRIVATE_GROUP = 2
HIDDEN_GROUP = 3

LOCKED_DOWN = PrivacySettings(
    friends_visible=False,
    likes_visible=False,
    pictures_visible=False,
    groups_visible=False,
)


def assemble_graph(
    user_ids: Iterable[int],
    friendships: Iterable[tuple[int, int]] = (),
    likes: Mapping[int, Iterable[int]] | None = None,
    page_ids: Iterable[int] = (),
    groups: Mapping[int, tuple[GroupVisibility, Iterable[int]]] | None = None,
    pictures: Iterable[Picture] = (),
    privacy: Mapping[int, PrivacySettings] | None = None,
    seed: int = 0,
) -> SocialGraph:
    """Build a consistent graph from one-sided relations (edges, likes, memberships)."""
    user_ids = sorted(user_ids)
    likes = likes or {}
    groups = groups or {}
    privacy = privacy or {}

    friends: dict[int, set[int]] = {user_id: set() for user_id in user_ids}
    for a, b in friendships:
        friends[a].add(b)
        friends[b].add(a)

    fans: dict[int, set[int]] = {page_id: set() for page_id in page_ids}
    for user_id, user_likes in likes.items():
        for page_id in user_likes:
            fans.setdefault(page_id, set()).add(user_id)

    groups_of: dict[int, set[int]] = {user_id: set() for user_id in user_ids}
    for group_id, (_, members) in groups.items():
        for member in members:
            groups_of[member].add(group_id)

    pictures = list(pictures)
    pictures_of: dict[int, list[int]] = {user_id: [] for user_id in user_ids}
    for picture in pictures:
        pictures_of[picture.owner].append(picture.id)

    return SocialGraph(
        users={
            user_id: User(
                id=user_id,
                friends=frozenset(friends[user_id]),
                likes=frozenset(likes.get(user_id, ())),
                groups=frozenset(groups_of[user_id]),
                pictures=tuple(pictures_of[user_id]),
                privacy=privacy.get(user_id, PUBLIC_PROFILE),
            )
            for user_id in user_ids
        },
        pages={
            page_id: Page(id=page_id, fans=frozenset(page_fans))
            for page_id, page_fans in fans.items()
        },
        groups={
            group_id: Group(id=group_id, members=frozenset(members), visibility=visibility)
            for group_id, (visibility, members) in groups.items()
        },
        pictures={picture.id: picture for picture in pictures},
        generation_seed=seed,
    )


def world_w1() -> SocialGraph:
    return assemble_graph(
        user_ids=range(1, 7),
        friendships=[(1, 2), (1, 3), (2, 4), (5, 6)],
        likes={1: [PAGE_A, PAGE_B], 2: [PAGE_A], 4: [PAGE_A], 3: [PAGE_B], 5: [PAGE_B], 6: [PAGE_B]},
        page_ids=[PAGE_A, PAGE_B],
        privacy={
            VICTIM: PrivacySettings(
                friends_visible=False,
                likes_visible=True,
                pictures_visible=False,
                groups_visible=False,
            )
        },
    )


def world_w2() -> SocialGraph:
    cover = Picture(
        id=COVER_PHOTO,
        owner=VICTIM,
        is_cover=True,
        likers=frozenset({2, 4}),
        commenters=frozenset({3}),
    )
    hidden_pictures = [
        Picture(id=picture_id, owner=VICTIM, likers=frozenset({2, 5}))
        for picture_id in range(2, 6)
    ]
    return assemble_graph(
        user_ids=range(1, 6),
        friendships=[(1, 2), (1, 3), (4, 5)],
        pictures=[cover, *hidden_pictures],
        privacy={VICTIM: LOCKED_DOWN},
    )


def world_w3() -> SocialGraph:
    return assemble_graph(
        user_ids=range(1, 8),
        friendships=[(1, 2), (1, 3), (5, 7)],
        groups={
            PUBLIC_GROUP: (GroupVisibility.PUBLIC, [1, 2, 7]),
            PRIVATE_GROUP: (GroupVisibility.PRIVATE, [1, 3]),
            HIDDEN_GROUP: (GroupVisibility.HIDDEN, [1, 3, 4]),
        },
        privacy={VICTIM: replace(LOCKED_DOWN, groups_visible=True)},
    )


FIXTURE_WORLDS = {"w1": world_w1, "w2": world_w2, "w3": world_w3}
