# this_file: schemaroles/mcp/http.py
"""StreamableHTTP transport: JSON-RPC messages POSTed to one endpoint."""

from __future__ import annotations

import json
import threading
import uuid

import uvicorn
from loguru import logger
from starlette.applications import Starlette
from starlette.concurrency import run_in_threadpool
from starlette.requests import Request
from starlette.responses import JSONResponse, Response
from starlette.routing import Route

from schemaroles.mcp.protocol import INVALID_REQUEST, PARSE_ERROR, McpServer, error_response

SESSION_HEADER = "Mcp-Session-Id"
DEFAULT_ENDPOINT = "/mcp"
DEFAULT_BIND = "127.0.0.1:8811"

_ALL_METHODS = ["GET", "POST", "PUT", "PATCH", "DELETE", "OPTIONS"]


class SessionStore:
    """Thread-safe set of issued session ids."""

    def __init__(self) -> None:
        self._sessions: set[str] = set()
        self._lock = threading.Lock()

    def create(self) -> str:
        session_id = uuid.uuid4().hex
        with self._lock:
            self._sessions.add(session_id)
        return session_id

    def discard(self, session_id: str) -> bool:
        """Forget a session; False when it was not issued or already ended."""
        with self._lock:
            if session_id not in self._sessions:
                return False
            self._sessions.remove(session_id)
            return True

    def __contains__(self, session_id: object) -> bool:
        with self._lock:
            return session_id in self._sessions

    def __len__(self) -> int:
        with self._lock:
            return len(self._sessions)


def create_http_app(server: McpServer, endpoint: str = DEFAULT_ENDPOINT) -> Starlette:
    """Build the ASGI application serving an MCP server.

    POST carries messages, DELETE ends a session (204), other methods get 405
    and non-JSON bodies 415. initialize issues a session id in the
    Mcp-Session-Id header; every later request must echo it (missing -> 400,
    unknown or ended -> 404). Notifications are acknowledged with 202.

    Args:
        server: Server handling the messages
        endpoint: URL path of the endpoint

    Returns:
        Starlette application
    """
    if not endpoint.startswith("/"):
        raise ValueError(f"endpoint must start with '/', got {endpoint!r}")
    sessions = SessionStore()

    async def end_session(request: Request) -> Response:
        session_id = request.headers.get(SESSION_HEADER)
        if session_id is None:
            return JSONResponse(
                error_response(None, INVALID_REQUEST, f"Missing {SESSION_HEADER} header"),
                status_code=400,
            )
        if not sessions.discard(session_id):
            return JSONResponse(
                error_response(None, INVALID_REQUEST, f"Unknown session: {session_id}"),
                status_code=404,
            )
        logger.debug(f"Ended session {session_id}")
        return Response(status_code=204)

    async def handle(request: Request) -> Response:
        if request.method == "DELETE":
            return await end_session(request)
        if request.method != "POST":
            return Response(status_code=405, headers={"Allow": "POST, DELETE"})

        content_type = request.headers.get("content-type", "").split(";")[0].strip().lower()
        if content_type != "application/json":
            return JSONResponse(
                error_response(None, INVALID_REQUEST, "Content-Type must be application/json"),
                status_code=415,
            )

        try:
            obj = json.loads(await request.body())
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            body = error_response(None, PARSE_ERROR, f"Parse error: {e}")
            return JSONResponse(body, status_code=400)

        is_initialize = isinstance(obj, dict) and obj.get("method") == "initialize"
        session_id = request.headers.get(SESSION_HEADER)
        if not is_initialize:
            request_id = obj.get("id") if isinstance(obj, dict) else None
            if session_id is None:
                return JSONResponse(
                    error_response(request_id, INVALID_REQUEST, f"Missing {SESSION_HEADER} header"),
                    status_code=400,
                )
            if session_id not in sessions:
                return JSONResponse(
                    error_response(request_id, INVALID_REQUEST, f"Unknown session: {session_id}"),
                    status_code=404,
                )

        response = await run_in_threadpool(server.handle_raw, obj)

        headers: dict[str, str] = {}
        if is_initialize and response is not None and "result" in response:
            headers[SESSION_HEADER] = sessions.create()
            logger.debug(f"Issued session {headers[SESSION_HEADER]}")
        if response is None:
            return Response(status_code=202, headers=headers)
        return JSONResponse(response, headers=headers)

    app = Starlette(routes=[Route(endpoint, handle, methods=_ALL_METHODS)])
    app.state.sessions = sessions
    return app


def parse_bind(bind: str) -> tuple[str, int]:
    """Split ``host:port``.

    Raises:
        ValueError: If the port is missing or not a number
    """
    host, separator, port = bind.rpartition(":")
    if not separator or not host or not port.isdigit():
        raise ValueError(f"Bind address must look like host:port, got {bind!r}")
    return host.strip("[]"), int(port)


def serve_http(
    server: McpServer, bind: str = DEFAULT_BIND, endpoint: str = DEFAULT_ENDPOINT
) -> None:
    """Serve over HTTP with uvicorn until interrupted.

    Args:
        server: Server handling the messages
        bind: host:port to listen on
        endpoint: URL path of the endpoint
    """
    host, port = parse_bind(bind)
    app = create_http_app(server, endpoint)
    logger.info(f"Serving {server.name} on http://{host}:{port}{endpoint}")
    uvicorn.run(app, host=host, port=port, log_level="warning")
