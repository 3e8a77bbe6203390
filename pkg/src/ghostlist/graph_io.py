"""
Graph files: one JSON document with the top-level keys "users", "pages",
"groups", "pictures" and "seed". Sets are written as ascending integer arrays
and keys in a fixed order, so a given graph always produces the same bytes.
Unknown keys anywhere in the document are rejected.
"""

import json
from pathlib import Path
from typing import Any

from beartype import beartype

from ghostlist.errors import GraphFormatError
from ghostlist.world import (
    Group,
    GroupVisibility,
    Page,
    Picture,
    PrivacySettings,
    SocialGraph,
    User,
)

TOP_LEVEL_KEYS = ("users", "pages", "groups", "pictures", "seed")
USER_KEYS = ("id", "friends", "likes", "groups", "pictures", "privacy")
PRIVACY_KEYS = ("friends_visible", "likes_visible", "pictures_visible", "groups_visible")
PAGE_KEYS = ("id", "fans")
GROUP_KEYS = ("id", "members", "visibility")
PICTURE_KEYS = ("id", "owner", "is_cover", "likers", "commenters")


# %% Encoding


def _sorted_ids(ids: frozenset[int]) -> list[int]:
    return sorted(ids)


def graph_to_document(graph: SocialGraph) -> dict[str, Any]:
    return {
        "users": [
            {
                "id": user.id,
                "friends": _sorted_ids(user.friends),
                "likes": _sorted_ids(user.likes),
                "groups": _sorted_ids(user.groups),
                "pictures": list(user.pictures),
                "privacy": {
                    "friends_visible": user.privacy.friends_visible,
                    "likes_visible": user.privacy.likes_visible,
                    "pictures_visible": user.privacy.pictures_visible,
                    "groups_visible": user.privacy.groups_visible,
                },
            }
            for user in sorted(graph.users.values(), key=lambda u: u.id)
        ],
        "pages": [
            {"id": page.id, "fans": _sorted_ids(page.fans)}
            for page in sorted(graph.pages.values(), key=lambda p: p.id)
        ],
        "groups": [
            {
                "id": group.id,
                "members": _sorted_ids(group.members),
                "visibility": group.visibility.value,
            }
            for group in sorted(graph.groups.values(), key=lambda g: g.id)
        ],
        "pictures": [
            {
                "id": picture.id,
                "owner": picture.owner,
                "is_cover": picture.is_cover,
                "likers": _sorted_ids(picture.likers),
                "commenters": _sorted_ids(picture.commenters),
            }
            for picture in sorted(graph.pictures.values(), key=lambda i: i.id)
        ],
        "seed": graph.generation_seed,
    }


def dumps_graph(graph: SocialGraph) -> str:
    return json.dumps(graph_to_document(graph), separators=(",", ":")) + "\n"


@beartype
def save_graph(graph: SocialGraph, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_graph(graph), encoding="utf-8", newline="\n")
    return None


# %% Decoding


def _expect_object(value: Any, keys: tuple[str, ...], where: str) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise GraphFormatError(f"{where}: expected an object")
    unknown = set(value) - set(keys)
    if unknown:
        raise GraphFormatError(f"{where}: unknown keys {sorted(unknown)}")
    missing = set(keys) - set(value)
    if missing:
        raise GraphFormatError(f"{where}: missing keys {sorted(missing)}")
    return value


def _expect_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise GraphFormatError(f"{where}: expected a non-negative integer")
    return value


def _expect_bool(value: Any, where: str) -> bool:
    if not isinstance(value, bool):
        raise GraphFormatError(f"{where}: expected a boolean")
    return value


def _expect_id_list(value: Any, where: str) -> list[int]:
    if not isinstance(value, list):
        raise GraphFormatError(f"{where}: expected an array of ids")
    return [_expect_int(item, f"{where}[{i}]") for i, item in enumerate(value)]


def _expect_id_set(value: Any, where: str) -> frozenset[int]:
    ids = _expect_id_list(value, where)
    if ids != sorted(set(ids)):
        raise GraphFormatError(f"{where}: ids must be unique and sorted ascending")
    return frozenset(ids)


def _expect_array(document: dict[str, Any], key: str) -> list[Any]:
    value = document[key]
    if not isinstance(value, list):
        raise GraphFormatError(f"{key}: expected an array")
    return value


def _unique_key(collection: dict[int, Any], key: int, where: str) -> int:
    if key in collection:
        raise GraphFormatError(f"{where}: duplicate id {key}")
    return key


def document_to_graph(document: Any) -> SocialGraph:
    document = _expect_object(document, TOP_LEVEL_KEYS, "document")

    users: dict[int, User] = {}
    for i, raw in enumerate(_expect_array(document, "users")):
        where = f"users[{i}]"
        raw = _expect_object(raw, USER_KEYS, where)
        privacy = _expect_object(raw["privacy"], PRIVACY_KEYS, f"{where}.privacy")
        user_id = _unique_key(users, _expect_int(raw["id"], f"{where}.id"), where)
        users[user_id] = User(
            id=user_id,
            friends=_expect_id_set(raw["friends"], f"{where}.friends"),
            likes=_expect_id_set(raw["likes"], f"{where}.likes"),
            groups=_expect_id_set(raw["groups"], f"{where}.groups"),
            pictures=tuple(_expect_id_list(raw["pictures"], f"{where}.pictures")),
            privacy=PrivacySettings(
                **{
                    key: _expect_bool(privacy[key], f"{where}.privacy.{key}")
                    for key in PRIVACY_KEYS
                }
            ),
        )

    pages: dict[int, Page] = {}
    for i, raw in enumerate(_expect_array(document, "pages")):
        where = f"pages[{i}]"
        raw = _expect_object(raw, PAGE_KEYS, where)
        page_id = _unique_key(pages, _expect_int(raw["id"], f"{where}.id"), where)
        pages[page_id] = Page(
            id=page_id, fans=_expect_id_set(raw["fans"], f"{where}.fans")
        )

    groups: dict[int, Group] = {}
    for i, raw in enumerate(_expect_array(document, "groups")):
        where = f"groups[{i}]"
        raw = _expect_object(raw, GROUP_KEYS, where)
        group_id = _unique_key(groups, _expect_int(raw["id"], f"{where}.id"), where)
        try:
            visibility = GroupVisibility(raw["visibility"])
        except ValueError:
            raise GraphFormatError(
                f"{where}.visibility: expected one of {[v.value for v in GroupVisibility]}"
            ) from None
        groups[group_id] = Group(
            id=group_id,
            members=_expect_id_set(raw["members"], f"{where}.members"),
            visibility=visibility,
        )

    pictures: dict[int, Picture] = {}
    for i, raw in enumerate(_expect_array(document, "pictures")):
        where = f"pictures[{i}]"
        raw = _expect_object(raw, PICTURE_KEYS, where)
        picture_id = _unique_key(
            pictures, _expect_int(raw["id"], f"{where}.id"), where
        )
        pictures[picture_id] = Picture(
            id=picture_id,
            owner=_expect_int(raw["owner"], f"{where}.owner"),
            is_cover=_expect_bool(raw["is_cover"], f"{where}.is_cover"),
            likers=_expect_id_set(raw["likers"], f"{where}.likers"),
            commenters=_expect_id_set(raw["commenters"], f"{where}.commenters"),
        )

    return SocialGraph(
        users=users,
        pages=pages,
        groups=groups,
        pictures=pictures,
        generation_seed=_expect_int(document["seed"], "seed"),
    )


def loads_graph(text: str, source: str = "<string>") -> SocialGraph:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(
            f"{source}: line {e.lineno} column {e.colno}: {e.msg}"
        ) from None
    try:
        return document_to_graph(document)
    except GraphFormatError as e:
        raise GraphFormatError(f"{source}: {e}") from None


@beartype
def load_graph(path: Path) -> SocialGraph:
    return loads_graph(path.read_text(encoding="utf-8"), source=str(path))
