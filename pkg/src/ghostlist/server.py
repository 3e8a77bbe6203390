import logging
import signal
import threading
from dataclasses import dataclass
from types import FrameType
from typing import Any

from flask import Flask, Response, jsonify, request
from werkzeug.serving import BaseWSGIServer, make_server

from ghostlist.config import ServiceConfig
from ghostlist.errors import AccessDenied, NotFound, RateLimited, SelfQuery
from ghostlist.graph_io import dumps_graph
from ghostlist.service import (
    FanSample,
    Hidden,
    MemberPage,
    MutualResult,
    OsnService,
    ReactionSet,
)
from ghostlist.world import SocialGraph

ACCOUNT_HEADER = "X-Account-Id"


# %% Wire encoding


def encode_id_set(ids: frozenset[int] | tuple[int, ...]) -> list[int]:
    return sorted(ids)


def encode_fan_sample(sample: FanSample) -> dict[str, Any]:
    return {"fans": encode_id_set(sample.sampled_fans), "total": sample.total_fan_count}


def encode_mutual_result(result: MutualResult) -> dict[str, Any]:
    body: dict[str, Any] = {
        "are_friends": result.are_friends,
        "mutual_friends": encode_id_set(result.mutual_friends),
    }
    if result.friends_since is not None:
        body["since"] = result.friends_since.isoformat()
    return body


def encode_reaction_set(reactions: ReactionSet) -> dict[str, Any]:
    return {
        "likers": encode_id_set(reactions.likers),
        "commenters": encode_id_set(reactions.commenters),
    }


def encode_member_page(page: MemberPage) -> dict[str, Any]:
    return {
        "members": encode_id_set(page.members),
        "total": page.total,
        "has_more": page.has_more,
    }


def _ids_or_hidden(key: str, result: frozenset[int] | Hidden) -> Any:
    if isinstance(result, Hidden):
        return jsonify({"hidden": True}), 403
    return jsonify({key: encode_id_set(result)})


# %% App


def _account_id() -> int:
    raw = request.headers.get(ACCOUNT_HEADER)
    if raw is None:
        raise _BadRequest(f"missing {ACCOUNT_HEADER} header")
    try:
        return int(raw)
    except ValueError:
        raise _BadRequest(f"{ACCOUNT_HEADER} must be an integer") from None


class _BadRequest(Exception):
    pass


def _int_arg(name: str) -> int:
    raw = request.args.get(name)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise _BadRequest(f"query parameter {name} must be an integer") from None


def create_app(service: OsnService) -> Flask:
    app = Flask("ghostlist")

    @app.errorhandler(_BadRequest)
    def bad_request(e: _BadRequest) -> Any:
        return jsonify({"error": str(e)}), 400

    @app.errorhandler(NotFound)
    def not_found(e: NotFound) -> Any:
        return jsonify({"error": str(e)}), 404

    @app.errorhandler(AccessDenied)
    def denied(e: AccessDenied) -> Any:
        return jsonify({"denied": True}), 403

    @app.errorhandler(SelfQuery)
    def self_query(e: SelfQuery) -> Any:
        return jsonify({"error": str(e)}), 400

    @app.errorhandler(RateLimited)
    def rate_limited(e: RateLimited) -> Any:
        return jsonify({"error": str(e)}), 429

    @app.get("/user/<int:user_id>/likes")
    def likes(user_id: int) -> Any:
        return _ids_or_hidden("pages", service.get_liked_pages(_account_id(), user_id))

    @app.get("/user/<int:user_id>/pictures")
    def pictures(user_id: int) -> Any:
        result = service.get_public_pictures(_account_id(), user_id)
        return jsonify({"pictures": encode_id_set(result)})

    @app.get("/user/<int:user_id>/groups")
    def groups(user_id: int) -> Any:
        return _ids_or_hidden("groups", service.get_groups(_account_id(), user_id))

    @app.get("/page/<int:page_id>/facepile")
    def facepile(page_id: int) -> Any:
        call_seed = _int_arg("seed")
        sample = service.facepile(_account_id(), page_id, call_seed)
        return jsonify(encode_fan_sample(sample))

    @app.get("/mutual/<int:a>/<int:b>")
    def mutual(a: int, b: int) -> Any:
        return jsonify(encode_mutual_result(service.mutual_content(_account_id(), a, b)))

    @app.get("/picture/<int:picture_id>/reactions")
    def reactions(picture_id: int) -> Any:
        result = service.get_picture_reactions(_account_id(), picture_id)
        return jsonify(encode_reaction_set(result))

    @app.get("/group/<int:group_id>/members")
    def members(group_id: int) -> Any:
        page_index = _int_arg("page")
        result = service.get_group_members(_account_id(), group_id, page_index)
        return jsonify(encode_member_page(result))

    # administration, outside the oracle and the ledger

    @app.get("/admin/graph")
    def admin_graph() -> Response:
        return Response(dumps_graph(service.graph), mimetype="application/json")

    @app.get("/admin/ledger")
    def admin_ledger() -> Any:
        return jsonify(
            {
                "length": len(service.ledger),
                "accounts": {
                    str(account_id): count
                    for account_id, count in service.requests_by_account().items()
                },
            }
        )

    @app.get("/admin/config")
    def admin_config() -> Any:
        return jsonify(
            {"sample_size": service.config.sample_size, "latency": service.latency}
        )

    return app


# %% Server


def _interrupt(signum: int, frame: FrameType | None) -> None:
    raise KeyboardInterrupt


@dataclass
class ServerHandle:
    service: OsnService
    server: BaseWSGIServer
    thread: threading.Thread

    @property
    def url(self) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}"

    def wait(self) -> None:
        self.thread.join()

    def serve_until_stopped(self) -> None:
        """Block until Ctrl+C or SIGTERM, then shut down. Main thread only."""
        previous = signal.signal(signal.SIGTERM, _interrupt)
        try:
            self.wait()
        except KeyboardInterrupt:
            pass
        finally:
            self.shutdown()
            signal.signal(signal.SIGTERM, previous)

    def shutdown(self) -> None:
        self.server.shutdown()
        self.thread.join()
        self.server.server_close()


def spawn_http_server(
    graph: SocialGraph,
    config: ServiceConfig | None = None,
    host: str = "127.0.0.1",
    port: int = 0,
    quiet: bool = True,
) -> ServerHandle:
    """Serve the graph on a background thread. Port 0 picks a free port."""
    if quiet:
        logging.getLogger("werkzeug").setLevel(logging.ERROR)

    service = OsnService(graph=graph, config=config)
    try:
        server = make_server(host, port, create_app(service), threaded=True)
    except SystemExit:
        # werkzeug exits the process on bind failures
        raise OSError(f"could not bind {host}:{port}") from None

    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return ServerHandle(service=service, server=server, thread=thread)
