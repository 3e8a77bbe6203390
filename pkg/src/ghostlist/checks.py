from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

from ghostlist.world import SocialGraph


@dataclass(frozen=True)
class GraphViolation:
    rule: str
    entities: tuple[int, ...]
    details: str = ""


def validate_graph(graph: SocialGraph) -> list[GraphViolation]:
    """Empty iff every cross-reference invariant of the graph holds."""
    return [
        *check_ids_match_keys(graph),
        *check_friendships(graph),
        *check_likes_and_fans(graph),
        *check_group_memberships(graph),
        *check_pictures(graph),
    ]


# %% Checks


def check_ids_match_keys(graph: SocialGraph) -> list[GraphViolation]:
    violations = []
    collections: list[tuple[str, Mapping[int, Any]]] = [
        ("user", graph.users),
        ("page", graph.pages),
        ("group", graph.groups),
        ("picture", graph.pictures),
    ]
    for kind, collection in collections:
        for key, entity in collection.items():
            if key != entity.id:
                violations.append(
                    GraphViolation(
                        rule=f"{kind}-key-mismatch",
                        entities=(key, entity.id),
                        details=f"{kind} stored under key {key} has id {entity.id}",
                    )
                )
    return violations


def check_friendships(graph: SocialGraph) -> list[GraphViolation]:
    violations = []
    for user in graph.users.values():
        for friend in sorted(user.friends):
            if friend == user.id:
                violations.append(
                    GraphViolation(
                        rule="self-friendship",
                        entities=(user.id,),
                        details=f"user {user.id} is its own friend",
                    )
                )
            elif friend not in graph.users:
                violations.append(
                    GraphViolation(
                        rule="unknown-user",
                        entities=(user.id, friend),
                        details=f"user {user.id} lists unknown friend {friend}",
                    )
                )
            elif user.id not in graph.users[friend].friends:
                violations.append(
                    GraphViolation(
                        rule="friendship-symmetry",
                        entities=(user.id, friend),
                        details=f"{friend} is a friend of {user.id} but not the reverse",
                    )
                )
    return violations


def check_likes_and_fans(graph: SocialGraph) -> list[GraphViolation]:
    violations = []
    for user in graph.users.values():
        for page_id in sorted(user.likes):
            if page_id not in graph.pages:
                violations.append(
                    GraphViolation(
                        rule="unknown-page",
                        entities=(user.id, page_id),
                        details=f"user {user.id} likes unknown page {page_id}",
                    )
                )
            elif user.id not in graph.pages[page_id].fans:
                violations.append(
                    GraphViolation(
                        rule="like-fan-consistency",
                        entities=(user.id, page_id),
                        details=f"user {user.id} likes page {page_id} but is not among its fans",
                    )
                )
    for page in graph.pages.values():
        for fan in sorted(page.fans):
            if fan not in graph.users:
                violations.append(
                    GraphViolation(
                        rule="unknown-user",
                        entities=(page.id, fan),
                        details=f"page {page.id} lists unknown fan {fan}",
                    )
                )
            elif page.id not in graph.users[fan].likes:
                violations.append(
                    GraphViolation(
                        rule="like-fan-consistency",
                        entities=(fan, page.id),
                        details=f"page {page.id} lists fan {fan} whose likes omit it",
                    )
                )
    return violations


def check_group_memberships(graph: SocialGraph) -> list[GraphViolation]:
    violations = []
    for user in graph.users.values():
        for group_id in sorted(user.groups):
            if group_id not in graph.groups:
                violations.append(
                    GraphViolation(
                        rule="unknown-group",
                        entities=(user.id, group_id),
                        details=f"user {user.id} belongs to unknown group {group_id}",
                    )
                )
            elif user.id not in graph.groups[group_id].members:
                violations.append(
                    GraphViolation(
                        rule="group-membership-consistency",
                        entities=(user.id, group_id),
                        details=f"user {user.id} lists group {group_id} which does not list them",
                    )
                )
    for group in graph.groups.values():
        for member in sorted(group.members):
            if member not in graph.users:
                violations.append(
                    GraphViolation(
                        rule="unknown-user",
                        entities=(group.id, member),
                        details=f"group {group.id} lists unknown member {member}",
                    )
                )
            elif group.id not in graph.users[member].groups:
                violations.append(
                    GraphViolation(
                        rule="group-membership-consistency",
                        entities=(member, group.id),
                        details=f"group {group.id} lists member {member} whose groups omit it",
                    )
                )
    return violations


def check_pictures(graph: SocialGraph) -> list[GraphViolation]:
    violations = []
    for user in graph.users.values():
        for picture_id in user.pictures:
            picture = graph.pictures.get(picture_id)
            if picture is None:
                violations.append(
                    GraphViolation(
                        rule="unknown-picture",
                        entities=(user.id, picture_id),
                        details=f"user {user.id} owns unknown picture {picture_id}",
                    )
                )
            elif picture.owner != user.id:
                violations.append(
                    GraphViolation(
                        rule="picture-ownership",
                        entities=(user.id, picture_id),
                        details=f"picture {picture_id} is listed by {user.id} but owned by {picture.owner}",
                    )
                )
    for picture in graph.pictures.values():
        owner = graph.users.get(picture.owner)
        if owner is None:
            violations.append(
                GraphViolation(
                    rule="unknown-user",
                    entities=(picture.id, picture.owner),
                    details=f"picture {picture.id} has unknown owner {picture.owner}",
                )
            )
        elif picture.id not in owner.pictures:
            violations.append(
                GraphViolation(
                    rule="picture-ownership",
                    entities=(picture.owner, picture.id),
                    details=f"owner {picture.owner} does not list picture {picture.id}",
                )
            )
        for reactor in sorted(picture.reactors):
            if reactor not in graph.users:
                violations.append(
                    GraphViolation(
                        rule="unknown-user",
                        entities=(picture.id, reactor),
                        details=f"picture {picture.id} has unknown reactor {reactor}",
                    )
                )
    return violations
