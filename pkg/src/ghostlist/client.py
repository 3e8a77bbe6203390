import threading
from datetime import date
from typing import Any

import requests

from ghostlist.errors import (
    AccessDenied,
    NotFound,
    OracleError,
    RateLimited,
    SelfQuery,
)
from ghostlist.graph_io import loads_graph
from ghostlist.server import ACCOUNT_HEADER
from ghostlist.service import (
    HIDDEN,
    FanSample,
    Hidden,
    MemberPage,
    MutualResult,
    ReactionSet,
)
from ghostlist.world import SocialGraph


class HttpOracle:
    """Oracle speaking to a `ghostlist serve` instance."""

    def __init__(self, base_url: str, latency: float | None = None, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._local = threading.local()
        self._latency = latency if latency is not None else self.fetch_config()["latency"]

    @property
    def latency(self) -> float:
        return self._latency

    @property
    def session(self) -> requests.Session:
        # one session per thread
        if not hasattr(self._local, "session"):
            self._local.session = requests.Session()
        return self._local.session

    def _get(
        self, path: str, account_id: int | None = None, params: dict[str, int] | None = None
    ) -> requests.Response:
        headers = {ACCOUNT_HEADER: str(account_id)} if account_id is not None else {}
        return self.session.get(
            f"{self.base_url}{path}", headers=headers, params=params, timeout=self.timeout
        )

    def _oracle_get(
        self, path: str, account_id: int, params: dict[str, int] | None = None
    ) -> dict[str, Any]:
        response = self._get(path, account_id=account_id, params=params)
        body = _json_or_empty(response)
        match response.status_code:
            case 200:
                return body
            case 403 if body.get("hidden"):
                return {"hidden": True}
            case 403:
                raise AccessDenied(f"{path}: access denied")
            case 404:
                raise NotFound(body.get("error", f"{path}: not found"))
            case 400 if path.startswith("/mutual/"):
                raise SelfQuery(body.get("error", path))
            case 429:
                raise RateLimited(body.get("error", path))
            case _:
                raise OracleError(
                    f"{path}: unexpected status {response.status_code}: {body.get('error', '')}"
                )

    # oracle

    def get_liked_pages(self, account_id: int, user_id: int) -> frozenset[int] | Hidden:
        body = self._oracle_get(f"/user/{user_id}/likes", account_id)
        return HIDDEN if body.get("hidden") else frozenset(body["pages"])

    def facepile(self, account_id: int, page_id: int, call_seed: int) -> FanSample:
        body = self._oracle_get(
            f"/page/{page_id}/facepile", account_id, params={"seed": call_seed}
        )
        return FanSample(
            page=page_id, sampled_fans=frozenset(body["fans"]), total_fan_count=body["total"]
        )

    def mutual_content(self, account_id: int, a: int, b: int) -> MutualResult:
        body = self._oracle_get(f"/mutual/{a}/{b}", account_id)
        since = body.get("since")
        return MutualResult(
            are_friends=body["are_friends"],
            friends_since=date.fromisoformat(since) if since is not None else None,
            mutual_friends=frozenset(body["mutual_friends"]),
        )

    def get_public_pictures(self, account_id: int, user_id: int) -> frozenset[int]:
        body = self._oracle_get(f"/user/{user_id}/pictures", account_id)
        return frozenset(body["pictures"])

    def get_picture_reactions(self, account_id: int, picture_id: int) -> ReactionSet:
        body = self._oracle_get(f"/picture/{picture_id}/reactions", account_id)
        return ReactionSet(
            picture=picture_id,
            likers=frozenset(body["likers"]),
            commenters=frozenset(body["commenters"]),
        )

    def get_groups(self, account_id: int, user_id: int) -> frozenset[int] | Hidden:
        body = self._oracle_get(f"/user/{user_id}/groups", account_id)
        return HIDDEN if body.get("hidden") else frozenset(body["groups"])

    def get_group_members(
        self, account_id: int, group_id: int, page_index: int
    ) -> MemberPage:
        body = self._oracle_get(
            f"/group/{group_id}/members", account_id, params={"page": page_index}
        )
        return MemberPage(
            group=group_id,
            page_index=page_index,
            members=tuple(body["members"]),
            total=body["total"],
            has_more=body["has_more"],
        )

    # administration

    def fetch_config(self) -> dict[str, Any]:
        response = self._get("/admin/config")
        response.raise_for_status()
        return response.json()

    def fetch_graph(self) -> SocialGraph:
        response = self._get("/admin/graph")
        response.raise_for_status()
        return loads_graph(response.text, source=f"{self.base_url}/admin/graph")

    def fetch_ledger(self) -> dict[str, Any]:
        response = self._get("/admin/ledger")
        response.raise_for_status()
        return response.json()


def _json_or_empty(response: requests.Response) -> dict[str, Any]:
    try:
        body = response.json()
    except ValueError:
        return {}
    return body if isinstance(body, dict) else {}
