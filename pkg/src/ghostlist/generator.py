"""
Synthetic social worlds.

Friendships follow a Watts-Strogatz small world, page popularity a bounded
Zipf law, and likes copy a friend's taste with probability `page_homophily`.
Every concern draws from its own child of one `SeedSequence`, so two graphs
built with the same seed and parameters that differ only in
`fraction_public_profiles` share everything except privacy flags.
"""

import networkx as nx
import numpy as np
from beartype import beartype
from numpy.random import Generator

from ghostlist.config import GenParams
from ghostlist.seeding import spawn_generators
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

_GROUP_VISIBILITIES = (
    GroupVisibility.PUBLIC,
    GroupVisibility.PRIVATE,
    GroupVisibility.HIDDEN,
)


# %% Friendships


def build_friendships(
    n_users: int, mean_degree: int, rewire_probability: float, rng: Generator
) -> list[set[int]]:
    friends: list[set[int]] = [set() for _ in range(n_users)]
    if n_users < 2:
        return friends

    # degrees of n_users - 1 or more give the complete graph
    graph_seed = int(rng.integers(2**32))
    if mean_degree >= n_users - 1:
        small_world = nx.complete_graph(n_users)
    else:
        small_world = nx.watts_strogatz_graph(
            n_users, mean_degree, rewire_probability, seed=graph_seed
        )
    for a, b in small_world.edges():
        if a != b:
            friends[a].add(b)
            friends[b].add(a)
    return friends


# %% Likes


def zipf_cdf(n_items: int, exponent: float) -> np.ndarray:
    weights = np.arange(1, n_items + 1, dtype=float) ** -exponent
    return np.cumsum(weights / weights.sum())


def _draw_from_cdf(cdf: np.ndarray, rng: Generator) -> int:
    return min(int(np.searchsorted(cdf, rng.random(), side="right")), len(cdf) - 1)


def assign_likes(
    friends: list[set[int]], params: GenParams, rng: Generator
) -> list[set[int]]:
    likes: list[set[int]] = [set() for _ in friends]
    if params.n_pages == 0:
        return likes

    cdf = zipf_cdf(n_items=params.n_pages, exponent=params.page_popularity_exponent)

    for user in rng.permutation(len(friends)):
        user = int(user)
        wanted = min(int(rng.poisson(params.likes_per_user_mean)), params.n_pages)
        tasteful_friends = sorted(f for f in friends[user] if likes[f])
        attempts = 0
        while len(likes[user]) < wanted and attempts < 20 * wanted:
            attempts += 1
            if tasteful_friends and rng.random() < params.page_homophily:
                friend = tasteful_friends[int(rng.integers(len(tasteful_friends)))]
                friend_likes = sorted(likes[friend])
                page = friend_likes[int(rng.integers(len(friend_likes)))]
            else:
                page = _draw_from_cdf(cdf=cdf, rng=rng)
            likes[user].add(page)
    return likes


# %% Pictures


def draw_reactors(
    owner_friends: list[int],
    n_users: int,
    count: int,
    friend_bias: float,
    rng: Generator,
) -> set[int]:
    """
    Each draw is a uniform friend of the owner with probability `friend_bias`,
    else a uniform non-friend (the owner included).
    """
    reactors: set[int] = set()
    friend_set = set(owner_friends)
    for _ in range(count):
        if owner_friends and rng.random() < friend_bias:
            reactors.add(owner_friends[int(rng.integers(len(owner_friends)))])
            continue
        while True:
            candidate = int(rng.integers(n_users))
            if candidate not in friend_set:
                reactors.add(candidate)
                break
    return reactors


def build_pictures(
    friends: list[set[int]], params: GenParams, rng: Generator
) -> tuple[dict[int, Picture], list[list[int]]]:
    n_users = len(friends)
    pictures: dict[int, Picture] = {}
    pictures_of: list[list[int]] = [[] for _ in range(n_users)]

    for owner in range(n_users):
        owner_friends = sorted(friends[owner])
        has_cover = rng.random() < params.cover_photo_rate
        n_normal = int(rng.poisson(params.pictures_per_user_mean))
        for is_cover in [True] * has_cover + [False] * n_normal:
            likers = draw_reactors(
                owner_friends=owner_friends,
                n_users=n_users,
                count=int(rng.poisson(params.reactions_per_picture_mean)),
                friend_bias=params.picture_friend_bias,
                rng=rng,
            )
            commenters = draw_reactors(
                owner_friends=owner_friends,
                n_users=n_users,
                count=int(rng.poisson(params.reactions_per_picture_mean)),
                friend_bias=params.picture_friend_bias,
                rng=rng,
            )
            picture_id = len(pictures)
            pictures[picture_id] = Picture(
                id=picture_id,
                owner=owner,
                is_cover=is_cover,
                likers=frozenset(likers),
                commenters=frozenset(commenters),
            )
            pictures_of[owner].append(picture_id)
    return pictures, pictures_of


# %% Groups


def build_groups(
    friends: list[set[int]], params: GenParams, rng: Generator
) -> dict[int, Group]:
    """Groups grow around a founder's circle of friends, then fill at random."""
    n_users = len(friends)
    weights = np.asarray(params.group_visibility_weights, dtype=float)
    groups: dict[int, Group] = {}

    for group_id in range(params.n_groups):
        visibility = _GROUP_VISIBILITIES[int(rng.choice(3, p=weights / weights.sum()))]
        members: set[int] = set()
        if n_users > 0:
            size = min(max(1, int(rng.poisson(params.group_size_mean))), n_users)
            founder = int(rng.integers(n_users))
            members.add(founder)
            circle = sorted(friends[founder])
            for friend in rng.permutation(circle)[: size // 2]:
                members.add(int(friend))
            while len(members) < size:
                members.add(int(rng.integers(n_users)))
        groups[group_id] = Group(
            id=group_id, members=frozenset(members), visibility=visibility
        )
    return groups


# %% Privacy


def assign_privacy(
    n_users: int, fraction_public: float, rng: Generator
) -> list[PrivacySettings]:
    settings = []
    for _ in range(n_users):
        if rng.random() < fraction_public:
            settings.append(PUBLIC_PROFILE)
        else:
            settings.append(
                PrivacySettings(
                    friends_visible=False,
                    likes_visible=bool(rng.random() < 0.5),
                    pictures_visible=bool(rng.random() < 0.5),
                    groups_visible=bool(rng.random() < 0.5),
                )
            )
    return settings


# %% Graph


@beartype
def generate_graph(params: GenParams, seed: int) -> SocialGraph:
    params.__post_init__()
    if params.n_users == 0:
        return SocialGraph(generation_seed=seed)

    topology_rng, likes_rng, pictures_rng, groups_rng, privacy_rng = spawn_generators(
        seed=seed, n=5
    )

    friends = build_friendships(
        n_users=params.n_users,
        mean_degree=params.mean_degree,
        rewire_probability=params.rewire_probability,
        rng=topology_rng,
    )
    likes = assign_likes(friends=friends, params=params, rng=likes_rng)
    pictures, pictures_of = build_pictures(
        friends=friends, params=params, rng=pictures_rng
    )
    groups = build_groups(friends=friends, params=params, rng=groups_rng)
    privacy = assign_privacy(
        n_users=params.n_users,
        fraction_public=params.fraction_public_profiles,
        rng=privacy_rng,
    )

    fans: dict[int, set[int]] = {page_id: set() for page_id in range(params.n_pages)}
    for user_id, user_likes in enumerate(likes):
        for page_id in user_likes:
            fans[page_id].add(user_id)

    groups_of: list[set[int]] = [set() for _ in range(params.n_users)]
    for group in groups.values():
        for member in group.members:
            groups_of[member].add(group.id)

    users = {
        user_id: User(
            id=user_id,
            friends=frozenset(friends[user_id]),
            likes=frozenset(likes[user_id]),
            groups=frozenset(groups_of[user_id]),
            pictures=tuple(pictures_of[user_id]),
            privacy=privacy[user_id],
        )
        for user_id in range(params.n_users)
    }
    pages = {
        page_id: Page(id=page_id, fans=frozenset(page_fans))
        for page_id, page_fans in fans.items()
    }

    return SocialGraph(
        users=users,
        pages=pages,
        groups=groups,
        pictures=pictures,
        generation_seed=seed,
    )
