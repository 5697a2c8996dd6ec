"""HTTP linked-graph federation.

Server side: POST ``/g/<schema>/<graph>`` executes the body (a script) as
one transaction against that graph and answers with a JSON result table
plus an ``ETag`` version validator.  Client side: a RemoteSession carries
the target url, the caller identity (``X-GQL-User`` header), and the last
seen ETag, which is sent as ``If-Match`` for optimistic validation.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import requests

from .engine import BindingTable, Database
from .errors import (
    BindFailure,
    ConflictError,
    ConnectFailure,
    GqlError,
    RemoteConflict,
    RemoteParseError,
    RemotePreconditionFailed,
    RemoteServerError,
    UnknownGraph,
)
from .parser import parse_script
from .render import wire_body
from .state import resolve_graph


def compute_etag(db: Database) -> str:
    """Strong validator: the committed end offset in lowercase hex, quoted."""
    return f'"{db.version:x}"'


@dataclass
class ServerConfig:
    allowed_users: list[str] | None = None  # None: no restriction


class GraphService:
    def __init__(self, db: Database, bind_address: tuple[str, int] = ("127.0.0.1", 0),
                 config: ServerConfig | None = None):
        self.db = db
        self.config = config or ServerConfig()
        service = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                service._handle(self)

        try:
            self.httpd = ThreadingHTTPServer(bind_address, Handler)
        except OSError as exc:
            raise BindFailure(str(exc)) from exc
        self.thread = threading.Thread(target=self.httpd.serve_forever,
                                       daemon=True)

    def start(self) -> "GraphService":
        self.thread.start()
        return self

    @property
    def address(self) -> tuple[str, int]:
        return self.httpd.server_address[:2]

    def graph_url(self, *segments: str) -> str:
        host, port = self.address
        return f"http://{host}:{port}/g/" + "/".join(segments)

    def shutdown(self):
        self.httpd.shutdown()
        self.httpd.server_close()

    # --- request handling ---

    def _handle(self, req: BaseHTTPRequestHandler):
        try:
            status, body, etag = self._respond(req)
        except Exception as exc:  # pragma: no cover - defensive
            status, body, etag = 500, {"error": str(exc)}, None
        data = json.dumps(body).encode("utf-8")
        req.send_response(status)
        req.send_header("Content-Type", "application/json")
        req.send_header("Content-Length", str(len(data)))
        if etag is not None:
            req.send_header("ETag", etag)
        req.end_headers()
        req.wfile.write(data)

    def _respond(self, req: BaseHTTPRequestHandler):
        if not req.path.startswith("/g/"):
            return 404, {"error": "not found"}, None
        segments = tuple(s for s in req.path[3:].split("/") if s)
        key = tuple(s.lower() for s in segments)
        try:
            resolve_graph(self.db.committed_state, key)
        except UnknownGraph:
            return 404, {"error": f"no graph at /{'/'.join(key)}"}, None
        user = req.headers.get("X-GQL-User", "anonymous")
        allowed = self.config.allowed_users
        if allowed is not None and user not in allowed:
            return 403, {"error": f"user {user!r} not allowed"}, None
        if_match = req.headers.get("If-Match")
        if if_match is not None and if_match != compute_etag(self.db):
            return 412, {"error": "version mismatch"}, compute_etag(self.db)
        length = int(req.headers.get("Content-Length", "0"))
        text = req.rfile.read(length).decode("utf-8")
        try:
            statements = parse_script(text)
        except GqlError as exc:
            return 400, {"error": str(exc)}, None
        txn = self.db.begin(key)
        try:
            table = None
            for stmt in statements:
                table = txn.execute(stmt)
            txn.commit()
        except ConflictError as exc:
            return 409, {"error": str(exc)}, None
        except GqlError as exc:
            return 400, {"error": str(exc)}, None
        if table is None:
            table = BindingTable([], [])
        return 200, wire_body(table), compute_etag(self.db)


def serve(db: Database, bind_address: tuple[str, int] = ("127.0.0.1", 0),
          config: ServerConfig | None = None) -> GraphService:
    return GraphService(db, bind_address, config).start()


# --- client side ---

@dataclass
class RemoteSession:
    url: str
    user: str = "anonymous"
    last_etag: str | None = None


@dataclass
class WireResult:
    columns: list[str]
    rows: list[list]
    etag: str | None = None


def remote_execute(session: RemoteSession, statements: str) -> WireResult:
    """Ship a statement batch as one POST; one request is one transaction."""
    if not statements.strip().strip(";"):
        return WireResult([], [], session.last_etag)
    headers = {
        "Content-Type": "text/plain; charset=utf-8",
        "X-GQL-User": session.user,
    }
    if session.last_etag is not None:
        headers["If-Match"] = session.last_etag
    try:
        resp = requests.post(session.url, data=statements.encode("utf-8"),
                             headers=headers, timeout=30)
    except requests.RequestException as exc:
        raise ConnectFailure(str(exc)) from exc
    if resp.status_code == 200:
        body = resp.json()
        session.last_etag = resp.headers.get("ETag")
        return WireResult(body.get("columns", []), body.get("rows", []),
                          session.last_etag)
    message = _remote_message(resp)
    if resp.status_code == 400:
        raise RemoteParseError(message)
    if resp.status_code == 409:
        raise RemoteConflict(message)
    if resp.status_code == 412:
        raise RemotePreconditionFailed(message)
    raise RemoteServerError(f"{resp.status_code}: {message}")


def _remote_message(resp) -> str:
    try:
        return resp.json().get("error", resp.text)
    except ValueError:
        return resp.text
