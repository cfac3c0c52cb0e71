# this_file: tests/test_mcp.py
"""Tests for the MCP servers: protocol handling, transports and the filesystem sandbox."""

import io
import json
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from starlette.testclient import TestClient

from schemaroles.mcp import (
    PROTOCOL_VERSION,
    SESSION_HEADER,
    FsServerConfig,
    McpServer,
    Sandbox,
    SandboxError,
    Tool,
    ToolDescriptor,
    ToolError,
    ToolResult,
    create_filesystem_server,
    create_http_app,
    create_propbank_server,
    serve_stdio,
)
from schemaroles.mcp import http as http_transport
from schemaroles.mcp.filesystem import FilesystemTools
from schemaroles.mcp.http import parse_bind, serve_http
from schemaroles.mcp.protocol import (
    INVALID_PARAMS,
    INVALID_REQUEST,
    METHOD_NOT_FOUND,
    PARSE_ERROR,
    RpcMessage,
    validate_arguments,
)

from .conftest import GOLDEN_DIR

GOLDEN_TRANSCRIPT = GOLDEN_DIR / "propbank_stdio.jsonl"


def request(method, params=None, request_id=1):
    message = {"jsonrpc": "2.0", "id": request_id, "method": method}
    if params is not None:
        message["params"] = params
    return message


def call(server, name, arguments, request_id=1):
    params = {"name": name, "arguments": arguments}
    return server.handle_raw(request("tools/call", params, request_id))


def tool_text(response):
    return response["result"]["content"][0]["text"]


def normalize_tool_texts(response):
    """Decode text blocks holding JSON so they compare structurally."""
    result = response.get("result")
    if not isinstance(result, dict) or "content" not in result:
        return response
    for block in result["content"]:
        try:
            block["text"] = json.loads(block["text"])
        except (json.JSONDecodeError, TypeError):
            pass
    return response


@pytest.fixture(scope="module")
def propbank_server(frame_index):
    return create_propbank_server(frame_index)


@pytest.fixture(scope="module")
def scratch_server(tmp_path_factory):
    """Filesystem server over an empty directory, shared by property examples."""
    root = tmp_path_factory.mktemp("scratch").resolve()
    return create_filesystem_server(FsServerConfig.from_paths([root])), root


@pytest.fixture(scope="session")
def sandbox_root(tmp_path_factory):
    """Allowed directory with a subdirectory, a file, and symlinks pointing in and out."""
    base = tmp_path_factory.mktemp("sandbox")
    root = base / "allowed"
    outside = base / "outside"
    (root / "sub").mkdir(parents=True)
    outside.mkdir()
    (root / "notes.txt").write_text("héllo\n", encoding="utf-8")
    (root / "sub" / "deep.txt").write_text("deep", encoding="utf-8")
    (outside / "secret.txt").write_text("secret", encoding="utf-8")
    (root / "escape").symlink_to(outside, target_is_directory=True)
    (root / "inner").symlink_to(root / "sub", target_is_directory=True)
    return root.resolve()


class TestProtocol:
    """Test JSON-RPC framing and dispatch."""

    def test_initialize(self, propbank_server):
        response = propbank_server.handle_raw(request("initialize", {}))
        assert response["result"]["protocolVersion"] == PROTOCOL_VERSION == "2025-06-18"
        assert response["result"]["serverInfo"]["name"] == "schemaroles-propbank"

    def test_notification_gets_no_response(self, propbank_server):
        message = {"jsonrpc": "2.0", "method": "notifications/initialized"}
        assert propbank_server.handle_raw(message) is None

    def test_client_response_is_ignored(self, propbank_server):
        assert propbank_server.handle_raw({"jsonrpc": "2.0", "id": 9, "result": {}}) is None

    @pytest.mark.parametrize(
        ("message", "code"),
        [
            ({"jsonrpc": "1.0", "id": 1, "method": "ping"}, INVALID_REQUEST),
            ({"jsonrpc": "2.0", "id": 1}, INVALID_REQUEST),
            ({"jsonrpc": "2.0", "id": True, "method": "ping"}, INVALID_REQUEST),
            ({"jsonrpc": "2.0", "id": 1, "method": 5}, INVALID_REQUEST),
            ([{"jsonrpc": "2.0", "id": 1, "method": "ping"}], INVALID_REQUEST),
            ("ping", INVALID_REQUEST),
            ({"jsonrpc": "2.0", "id": 1, "method": "resources/list"}, METHOD_NOT_FOUND),
            ({"jsonrpc": "2.0", "id": 1, "method": "ping", "params": [1]}, INVALID_PARAMS),
            ({"jsonrpc": "2.0", "id": 1, "method": "tools/call", "params": {}}, INVALID_PARAMS),
        ],
    )
    def test_error_codes(self, propbank_server, message, code):
        response = propbank_server.handle_raw(message)
        assert response["error"]["code"] == code
        assert response["jsonrpc"] == "2.0"

    def test_error_echoes_valid_id(self, propbank_server):
        response = propbank_server.handle_raw({"jsonrpc": "2.0", "id": "abc", "method": 3})
        assert response["id"] == "abc"

    @pytest.mark.parametrize("request_id", [1.5, -3, 0, "", "req-7"])
    def test_any_number_or_string_is_an_id(self, propbank_server, request_id):
        message = {"jsonrpc": "2.0", "id": request_id, "method": "ping"}
        response = propbank_server.handle_raw(message)
        assert response == {"jsonrpc": "2.0", "id": request_id, "result": {}}

    def test_unknown_tool(self, propbank_server):
        response = call(propbank_server, "delete_everything", {})
        assert response["error"]["code"] == INVALID_PARAMS
        assert "Unknown tool" in response["error"]["message"]

    @pytest.mark.parametrize(
        "arguments",
        [
            {},
            {"lemma": 3},
            {"lemma": "order", "max_results": 0},
            {"lemma": "order", "max_results": True},
            {"lemma": "order", "limit": 2},
        ],
    )
    def test_invalid_arguments(self, propbank_server, arguments):
        """Test that schema violations are protocol errors, not tool errors."""
        response = call(propbank_server, "search_by_lemma", arguments)
        assert response["error"]["code"] == INVALID_PARAMS

    def test_validate_arguments_fills_defaults(self):
        schema = {
            "type": "object",
            "properties": {"n": {"type": "integer", "default": 3}, "s": {"type": "string"}},
        }
        assert validate_arguments(schema, {"s": "x"}) == {"n": 3, "s": "x"}

    def test_handler_crash_is_internal_error(self):
        def crash(arguments):
            raise KeyError("boom")

        server = McpServer("t", "0", [Tool(ToolDescriptor("crash", "crashes"), crash)])
        response = call(server, "crash", {})
        assert response["error"]["code"] == -32603

    def test_duplicate_tool_names(self):
        tool = Tool(ToolDescriptor("same", "x"), lambda arguments: ToolResult.text("x"))
        with pytest.raises(ValueError):
            McpServer("t", "0", [tool, tool])

    def test_message_round_trip(self):
        message = RpcMessage.parse({"jsonrpc": "2.0", "method": "notifications/initialized"})
        assert message.is_notification
        assert message.to_dict() == {"jsonrpc": "2.0", "method": "notifications/initialized"}

    def test_tool_result_needs_content(self):
        with pytest.raises(ValueError):
            ToolResult(content=())


class TestPropBankServer:
    """Test the PropBank query tools."""

    def test_tools_list(self, propbank_server):
        tools = propbank_server.handle_raw(request("tools/list"))["result"]["tools"]
        assert [tool["name"] for tool in tools] == ["search_by_lemma", "search_by_sense_id"]
        assert tools[0]["inputSchema"]["required"] == ["lemma"]

    def test_search_by_lemma(self, propbank_server):
        response = call(propbank_server, "search_by_lemma", {"lemma": "order"})
        payload = json.loads(tool_text(response))
        assert payload["count"] == 3
        order_02 = payload["rolesets"][1]
        assert order_02["sense_id"] == "order.02"
        assert order_02["roles"][0] == {"label": "ARG0", "description": "orderer"}

    def test_unknown_lemma_is_not_an_error(self, propbank_server):
        response = call(propbank_server, "search_by_lemma", {"lemma": "xyzzy"})
        assert response["result"]["isError"] is False
        assert json.loads(tool_text(response))["count"] == 0

    def test_search_by_sense_id_with_examples(self, propbank_server):
        response = call(propbank_server, "search_by_sense_id", {"sense_id": "order.02"})
        payload = json.loads(tool_text(response))
        assert payload["examples"][0]["arguments"][-1] == {"label": "ARGM-LOC", "text": "in Paris"}

    def test_not_found_is_tool_error(self, propbank_server):
        response = call(propbank_server, "search_by_sense_id", {"sense_id": "order.99"})
        assert response["result"] == {
            "content": [{"type": "text", "text": "Roleset not found: order.99"}],
            "isError": True,
        }

    def test_every_roleset_round_trips_over_the_wire(self, propbank_server, frame_index):
        for number, roleset in enumerate(frame_index, start=1):
            response = call(
                propbank_server, "search_by_sense_id", {"sense_id": roleset.sense_id}, number
            )
            assert json.loads(tool_text(response)) == roleset.to_dict()

            arguments = {"lemma": roleset.lemma, "max_results": 100}
            payload = json.loads(tool_text(call(propbank_server, "search_by_lemma", arguments)))
            assert roleset.to_summary_dict() in payload["rolesets"]


class TestStdioTransport:
    """Test newline-delimited JSON-RPC over streams."""

    def test_golden_transcript(self, propbank_server):
        """Test a recorded client session message by message."""
        exchanges = [
            json.loads(line)
            for line in GOLDEN_TRANSCRIPT.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        stdin = io.StringIO("".join(json.dumps(item["request"]) + "\n" for item in exchanges))
        stdout = io.StringIO()

        assert serve_stdio(propbank_server, stdin, stdout) == 0

        responses = [json.loads(line) for line in stdout.getvalue().splitlines()]
        expected = [item["response"] for item in exchanges if item["response"] is not None]
        assert len(responses) == len(expected)
        for actual, wanted in zip(responses, expected, strict=True):
            assert normalize_tool_texts(actual) == wanted

    def test_one_line_per_message(self, propbank_server):
        stdin = io.StringIO(json.dumps(request("tools/list")) + "\n")
        stdout = io.StringIO()
        serve_stdio(propbank_server, stdin, stdout)
        assert stdout.getvalue().count("\n") == 1
        assert stdout.getvalue().endswith("\n")

    def test_garbage_then_valid(self, propbank_server):
        """Test that a parse error does not stop the loop."""
        stdin = io.StringIO("{oops\n\n" + json.dumps(request("ping", request_id=2)) + "\n")
        stdout = io.StringIO()
        serve_stdio(propbank_server, stdin, stdout)

        first, second = (json.loads(line) for line in stdout.getvalue().splitlines())
        assert first["error"]["code"] == PARSE_ERROR
        assert first["id"] is None
        assert second == {"jsonrpc": "2.0", "id": 2, "result": {}}


class TestHttpTransport:
    """Test the POST-only HTTP endpoint and its sessions."""

    @pytest.fixture
    def client(self, propbank_server):
        return TestClient(create_http_app(propbank_server))

    def initialize(self, client):
        response = client.post("/mcp", json=request("initialize", {}))
        assert response.status_code == 200
        return response.headers[SESSION_HEADER]

    def test_initialize_issues_session(self, client):
        session_id = self.initialize(client)
        assert session_id

    def test_session_round_trip(self, client):
        session_id = self.initialize(client)
        response = client.post(
            "/mcp",
            json=request("tools/call", {"name": "search_by_lemma", "arguments": {"lemma": "buy"}}),
            headers={SESSION_HEADER: session_id},
        )
        assert response.status_code == 200
        assert json.loads(tool_text(response.json()))["rolesets"][0]["sense_id"] == "buy.01"

    def test_notification_accepted(self, client):
        session_id = self.initialize(client)
        response = client.post(
            "/mcp",
            json={"jsonrpc": "2.0", "method": "notifications/initialized"},
            headers={SESSION_HEADER: session_id},
        )
        assert response.status_code == 202
        assert response.content == b""

    def test_get_not_allowed(self, client):
        response = client.get("/mcp")
        assert response.status_code == 405
        assert response.headers["allow"] == "POST, DELETE"

    def test_wrong_content_type(self, client):
        response = client.post("/mcp", content=b"ping", headers={"content-type": "text/plain"})
        assert response.status_code == 415

    def test_malformed_json(self, client):
        response = client.post(
            "/mcp", content=b"{oops", headers={"content-type": "application/json"}
        )
        assert response.status_code == 400
        assert response.json()["error"]["code"] == PARSE_ERROR

    def test_missing_session(self, client):
        response = client.post("/mcp", json=request("ping"))
        assert response.status_code == 400

    def test_unknown_session(self, client):
        response = client.post("/mcp", json=request("ping"), headers={SESSION_HEADER: "nope"})
        assert response.status_code == 404

    def test_custom_endpoint(self, propbank_server):
        client = TestClient(create_http_app(propbank_server, "/rpc"))
        assert client.post("/rpc", json=request("initialize", {})).status_code == 200
        assert client.post("/mcp", json=request("initialize", {})).status_code == 404

    def test_endpoint_must_be_absolute(self, propbank_server):
        with pytest.raises(ValueError):
            create_http_app(propbank_server, "mcp")

    @pytest.mark.parametrize(
        ("bind", "expected"),
        [("127.0.0.1:8811", ("127.0.0.1", 8811)), ("[::1]:9000", ("::1", 9000))],
    )
    def test_parse_bind(self, bind, expected):
        assert parse_bind(bind) == expected

    @pytest.mark.parametrize("bind", ["localhost", ":80", "host:port"])
    def test_parse_bind_rejects(self, bind):
        with pytest.raises(ValueError):
            parse_bind(bind)

    def test_serve_http_runs_uvicorn(self, propbank_server, monkeypatch):
        calls = []
        monkeypatch.setattr(
            http_transport.uvicorn, "run", lambda app, **kwargs: calls.append((app, kwargs))
        )

        serve_http(propbank_server, "0.0.0.0:9001", "/rpc")

        [(app, kwargs)] = calls
        assert kwargs["host"] == "0.0.0.0"
        assert kwargs["port"] == 9001
        assert TestClient(app).post("/rpc", json=request("initialize", {})).status_code == 200

    def test_end_session(self, client):
        session_id = self.initialize(client)
        headers = {SESSION_HEADER: session_id}

        assert client.delete("/mcp", headers=headers).status_code == 204
        assert client.post("/mcp", json=request("ping"), headers=headers).status_code == 404
        assert client.delete("/mcp", headers=headers).status_code == 404
        assert client.delete("/mcp").status_code == 400
        assert len(client.app.state.sessions) == 0

    def test_concurrent_searches_match_sequential_answers(self, propbank_server):
        lemmas = ["order", "buy", "view", "locate", "sell", "xyzzy"] * 3
        numbered = list(enumerate(lemmas, start=1))
        with TestClient(create_http_app(propbank_server)) as client:
            session_id = self.initialize(client)

            def search(item):
                number, lemma = item
                params = {"name": "search_by_lemma", "arguments": {"lemma": lemma}}
                body = request("tools/call", params, number)
                return client.post("/mcp", json=body, headers={SESSION_HEADER: session_id})

            with ThreadPoolExecutor(max_workers=6) as pool:
                responses = list(pool.map(search, numbered))

        for (number, lemma), response in zip(numbered, responses, strict=True):
            assert response.status_code == 200
            expected = call(propbank_server, "search_by_lemma", {"lemma": lemma}, number)
            assert response.json() == expected

    def test_requests_are_in_flight_together(self):
        """Test that a call waiting for a second one does not block it."""
        meeting = threading.Barrier(2, timeout=10)

        def wait_for_peer(arguments):
            meeting.wait()
            return ToolResult.text("met")

        server = McpServer("t", "0", [Tool(ToolDescriptor("meet", "waits"), wait_for_peer)])
        with TestClient(create_http_app(server)) as client:
            session_id = self.initialize(client)

            def meet(number):
                body = request("tools/call", {"name": "meet", "arguments": {}}, number)
                return client.post("/mcp", json=body, headers={SESSION_HEADER: session_id})

            with ThreadPoolExecutor(max_workers=2) as pool:
                responses = list(pool.map(meet, [1, 2]))

        assert [tool_text(response.json()) for response in responses] == ["met", "met"]

    def test_same_answers_as_stdio(self, propbank_server, client):
        def tool_call(name, arguments, request_id):
            return request("tools/call", {"name": name, "arguments": arguments}, request_id)

        messages = [
            request("tools/list", request_id=2),
            tool_call("search_by_lemma", {"lemma": "order"}, 3),
            tool_call("search_by_sense_id", {"sense_id": "buy.01"}, 4),
            tool_call("search_by_sense_id", {"sense_id": "x.99"}, 5),
            request("ping", request_id="six"),
            request("resources/list", request_id=7),
        ]
        stdin = io.StringIO("".join(json.dumps(message) + "\n" for message in messages))
        stdout = io.StringIO()
        serve_stdio(propbank_server, stdin, stdout)
        over_stdio = [json.loads(line) for line in stdout.getvalue().splitlines()]


        session_id = self.initialize(client)
        over_http = [
            client.post("/mcp", json=message, headers={SESSION_HEADER: session_id}).json()
            for message in messages
        ]
        assert over_http == over_stdio
        assert len(over_http) == len(messages)



class TestFilesystemServer:
    """Test the sandboxed filesystem tools."""

    @pytest.fixture
    def workspace(self, tmp_path):
        (tmp_path / "docs").mkdir()
        (tmp_path / "docs" / "readme.md").write_text("# Hi\n", encoding="utf-8")
        (tmp_path / "b.txt").write_text("b", encoding="utf-8")
        (tmp_path / "blob.bin").write_bytes(b"\xff\xfe\x00")
        return tmp_path

    @pytest.fixture
    def fs_server(self, workspace):
        return create_filesystem_server(FsServerConfig.from_paths([workspace]))

    def test_tools_list(self, fs_server):
        tools = fs_server.handle_raw(request("tools/list"))["result"]["tools"]
        assert [tool["name"] for tool in tools] == [
            "list_directory",
            "read_text_file",
            "read_file",
            "write_file",
        ]

    def test_list_directory(self, fs_server, workspace):
        payload = json.loads(tool_text(call(fs_server, "list_directory", {"path": str(workspace)})))
        assert payload["entries"] == [
            {"name": "b.txt", "kind": "file"},
            {"name": "blob.bin", "kind": "file"},
            {"name": "docs", "kind": "directory"},
        ]

    def test_read_relative_path(self, fs_server):
        """Test that relative paths start at the first allowed directory."""
        response = call(fs_server, "read_text_file", {"path": "docs/readme.md"})
        assert tool_text(response) == "# Hi\n"
        assert tool_text(call(fs_server, "read_file", {"path": "docs/readme.md"})) == "# Hi\n"

    def test_read_errors(self, fs_server):
        for path, message in [
            ("missing.txt", "not found"),
            ("docs", "not a file"),
            ("blob.bin", "not a UTF-8 text file"),
            ("../outside.txt", "access denied"),
        ]:
            response = call(fs_server, "read_text_file", {"path": path})
            assert response["result"]["isError"] is True
            assert tool_text(response).startswith(message)

    def test_write_then_read(self, fs_server, workspace):
        response = call(fs_server, "write_file", {"path": "new/ünï.txt", "content": "çà\n"})
        assert response["result"]["isError"] is False
        assert (workspace / "new" / "ünï.txt").read_text(encoding="utf-8") == "çà\n"
        assert tool_text(call(fs_server, "read_text_file", {"path": "new/ünï.txt"})) == "çà\n"

    def test_write_outside_is_denied(self, fs_server, workspace):
        response = call(fs_server, "write_file", {"path": "../x.txt", "content": "x"})
        assert response["result"]["isError"] is True
        assert not (workspace.parent / "x.txt").exists()

    def test_read_only(self, workspace):
        server = create_filesystem_server(FsServerConfig.from_paths([workspace], read_only=True))
        response = call(server, "write_file", {"path": "b.txt", "content": "changed"})
        assert tool_text(response) == "access denied: server is read-only"
        assert (workspace / "b.txt").read_text(encoding="utf-8") == "b"

    def test_write_locks_are_dropped(self, workspace):
        tools = FilesystemTools(FsServerConfig.from_paths([workspace]))

        def write(number):
            return tools.write_file({"path": f"out/f{number % 3}.txt", "content": str(number)})

        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(write, range(30)))

        assert not any(result.is_error for result in results)
        assert tools._locks == {}
        for name in ["f0.txt", "f1.txt", "f2.txt"]:
            assert (workspace / "out" / name).read_text(encoding="utf-8").isdigit()

    @settings(max_examples=100, deadline=None)
    @given(
        content=st.text(),
        name=st.sampled_from(["a.txt", "sub/b.md", "ünï/ç.json"]),
    )
    def test_write_read_round_trip(self, scratch_server, content, name):
        """Test that arbitrary UTF-8 text comes back unchanged, line endings included."""
        server, root = scratch_server
        written = call(server, "write_file", {"path": name, "content": content})
        assert written["result"]["isError"] is False
        assert tool_text(call(server, "read_text_file", {"path": name})) == content
        assert (root / name).read_bytes() == content.encode("utf-8")

    def test_config_validation(self, tmp_path):

        with pytest.raises(ValueError):
            FsServerConfig(allowed_dirs=())
        with pytest.raises(ValueError):
            FsServerConfig.from_paths([tmp_path / "missing"])
        config = FsServerConfig.from_paths([tmp_path, tmp_path / "."])
        assert config.allowed_dirs == (tmp_path.resolve(),)


PATH_PARTS = ["..", ".", "sub", "deep.txt", "notes.txt", "escape", "inner", "secret.txt", "x"]


@st.composite
def requested_paths(draw):
    parts = draw(st.lists(st.sampled_from(PATH_PARTS), min_size=0, max_size=6))
    path = "/".join(parts)
    prefix = draw(st.sampled_from(["", "/", "./"]))
    return prefix + path


class TestSandbox:
    """Test path containment against an independent realpath check."""

    def test_symlink_escape_is_denied(self, sandbox_root):
        sandbox = Sandbox((sandbox_root,))
        with pytest.raises(SandboxError):
            sandbox.resolve("escape/secret.txt")

    def test_symlink_inside_is_allowed(self, sandbox_root):
        sandbox = Sandbox((sandbox_root,))
        assert sandbox.resolve("inner/deep.txt") == sandbox_root / "sub" / "deep.txt"

    def test_contains(self, sandbox_root):
        sandbox = Sandbox((sandbox_root,))
        assert sandbox.contains("inner/deep.txt")
        assert sandbox.contains(str(sandbox_root))
        assert not sandbox.contains("escape/secret.txt")
        assert not sandbox.contains("../")

    def test_sandbox_error_is_tool_error(self):
        assert issubclass(SandboxError, ToolError)

    @given(requested=requested_paths())
    @settings(max_examples=1000, deadline=None)
    def test_containment_matches_realpath(self, sandbox_root, requested):
        """Test that a path is accepted exactly when its real path stays inside the root."""
        sandbox = Sandbox((sandbox_root,))
        real = Path(os.path.realpath(os.path.join(sandbox_root, requested)))
        inside = real == sandbox_root or sandbox_root in real.parents

        if inside:
            assert sandbox.resolve(requested) == real
        else:
            with pytest.raises(SandboxError):
                sandbox.resolve(requested)

    @given(requested=requested_paths())
    @settings(max_examples=200, deadline=None)
    def test_read_tool_never_leaks(self, sandbox_root, requested):
        server = create_filesystem_server(FsServerConfig.from_paths([sandbox_root]))
        response = call(server, "read_text_file", {"path": requested})
        assert "secret" not in tool_text(response) or response["result"]["isError"]
