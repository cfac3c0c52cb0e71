# this_file: schemaroles/mcp/protocol.py
"""JSON-RPC 2.0 message handling and tool dispatch for MCP servers."""

from __future__ import annotations

import json
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from typing import Any

from loguru import logger

PROTOCOL_VERSION = "2025-06-18"
JSONRPC_VERSION = "2.0"

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
INTERNAL_ERROR = -32603

RequestId = int | float | str | None

_JSON_TYPES: dict[str, tuple[type, ...]] = {
    "string": (str,),
    "integer": (int,),
    "number": (int, float),
    "boolean": (bool,),
    "object": (dict,),
    "array": (list,),
}


class RpcError(Exception):
    """A JSON-RPC error, sent back as the response's error member."""

    def __init__(self, code: int, message: str, data: Any = None):
        """Initialize protocol error.

        Args:
            code: JSON-RPC error code
            message: Error description
            data: Optional structured detail
        """
        self.code = code
        self.message = message
        self.data = data
        super().__init__(f"[{code}] {message}")

    def to_dict(self) -> dict[str, Any]:
        error: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.data is not None:
            error["data"] = self.data
        return error


class ToolError(Exception):
    """Raised by tool handlers; becomes an isError tool result."""


@dataclass(frozen=True)
class RpcMessage:
    """A JSON-RPC 2.0 request, notification or response.

    Attributes:
        id: Request id; None for notifications
        method: Method name (requests and notifications)
        params: Method parameters
        result: Response result
        error: Response error
        is_notification: True when the message carried no id member
    """

    id: RequestId = None
    method: str | None = None
    params: Any = None
    result: Any = None
    error: RpcError | None = None
    is_notification: bool = False

    @classmethod
    def parse(cls, obj: Any) -> RpcMessage:
        """Validate JSON-RPC framing of a decoded object.

        Raises:
            RpcError: INVALID_REQUEST when the framing is wrong
        """
        if not isinstance(obj, dict):
            raise RpcError(INVALID_REQUEST, "Invalid Request: message must be a JSON object")
        if obj.get("jsonrpc") != JSONRPC_VERSION:
            raise RpcError(INVALID_REQUEST, "Invalid Request: jsonrpc must be \"2.0\"")
        request_id = obj.get("id")
        if request_id is not None and (
            isinstance(request_id, bool) or not isinstance(request_id, int | float | str)
        ):
            raise RpcError(INVALID_REQUEST, "Invalid Request: id must be a string or number")

        method = obj.get("method")
        if method is None:
            if "result" in obj or "error" in obj:
                return cls(id=request_id, result=obj.get("result"))
            raise RpcError(INVALID_REQUEST, "Invalid Request: missing method")
        if not isinstance(method, str):
            raise RpcError(INVALID_REQUEST, "Invalid Request: method must be a string")
        return cls(
            id=request_id,
            method=method,
            params=obj.get("params"),
            is_notification="id" not in obj,
        )

    @property
    def is_response(self) -> bool:
        return self.method is None

    @classmethod
    def success(cls, request_id: RequestId, result: Any) -> RpcMessage:
        return cls(id=request_id, result=result)

    @classmethod
    def failure(cls, request_id: RequestId, error: RpcError) -> RpcMessage:
        return cls(id=request_id, error=error)

    def to_dict(self) -> dict[str, Any]:
        message: dict[str, Any] = {"jsonrpc": JSONRPC_VERSION}
        if self.method is not None:
            if not self.is_notification:
                message["id"] = self.id
            message["method"] = self.method
            if self.params is not None:
                message["params"] = self.params
            return message
        message["id"] = self.id
        if self.error is not None:
            message["error"] = self.error.to_dict()
        else:
            message["result"] = self.result
        return message


def error_response(request_id: RequestId, code: int, message: str) -> dict[str, Any]:
    """Wire form of an error response."""
    return RpcMessage.failure(request_id, RpcError(code, message)).to_dict()


@dataclass(frozen=True)
class ToolDescriptor:
    """Name, description and JSON-Schema input of a tool."""

    name: str
    description: str
    input_schema: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "inputSchema": self.input_schema,
        }


@dataclass(frozen=True)
class ToolResult:
    """Tool call outcome: text content blocks and an error flag."""

    content: tuple[str, ...]
    is_error: bool = False

    def __post_init__(self) -> None:
        if not self.content:
            raise ValueError("ToolResult needs at least one content block")

    @classmethod
    def text(cls, text: str) -> ToolResult:
        return cls(content=(text,))

    @classmethod
    def json(cls, payload: Any) -> ToolResult:
        """Structured answer carried as a JSON document in one text block."""
        return cls(content=(json.dumps(payload, ensure_ascii=False, indent=2),))

    @classmethod
    def error(cls, message: str) -> ToolResult:
        return cls(content=(message,), is_error=True)

    def to_dict(self) -> dict[str, Any]:
        return {
            "content": [{"type": "text", "text": text} for text in self.content],
            "isError": self.is_error,
        }


ToolHandler = Callable[[dict[str, Any]], ToolResult]


@dataclass(frozen=True)
class Tool:
    """A descriptor with the handler that implements it."""

    descriptor: ToolDescriptor
    handler: ToolHandler

    @property
    def name(self) -> str:
        return self.descriptor.name


def validate_arguments(schema: dict[str, Any], arguments: Any) -> dict[str, Any]:
    """Check tool arguments against a flat JSON-Schema object and fill defaults.

    Supports property types, minimum, required and additionalProperties.

    Returns:
        Arguments with defaults applied

    Raises:
        ValueError: Describing every problem found
    """
    if not isinstance(arguments, dict):
        raise ValueError("arguments must be an object")

    properties: dict[str, Any] = schema.get("properties", {})
    problems: list[str] = []
    for name in schema.get("required", []):
        if name not in arguments:
            problems.append(f"missing required argument '{name}'")
    if schema.get("additionalProperties") is False:
        for name in arguments:
            if name not in properties:
                problems.append(f"unexpected argument '{name}'")

    normalized: dict[str, Any] = {}
    for name, spec in properties.items():
        if name not in arguments:
            if "default" in spec:
                normalized[name] = spec["default"]
            continue
        value = arguments[name]
        expected = spec.get("type")
        if expected in _JSON_TYPES:
            matches = isinstance(value, _JSON_TYPES[expected])
            if expected != "boolean" and isinstance(value, bool):
                matches = False
            if not matches:
                problems.append(f"argument '{name}' must be of type {expected}")
                continue
        if "minimum" in spec and value < spec["minimum"]:
            problems.append(f"argument '{name}' must be >= {spec['minimum']}")
            continue
        normalized[name] = value

    if problems:
        raise ValueError("; ".join(problems))
    return normalized


class McpServer:
    """Transport-independent MCP server exposing a fixed set of tools.

    handle() is safe to call from several threads when the tool handlers are.
    """

    def __init__(self, name: str, version: str, tools: Iterable[Tool]):
        """Initialize server.

        Args:
            name: Server name reported at initialize
            version: Server version reported at initialize
            tools: Tools in listing order

        Raises:
            ValueError: If two tools share a name
        """
        self.name = name
        self.version = version
        self.tools: dict[str, Tool] = {}
        for tool in tools:
            if tool.name in self.tools:
                raise ValueError(f"Duplicate tool name: {tool.name}")
            self.tools[tool.name] = tool
        logger.debug(f"Initialized McpServer {name} with tools: {list(self.tools)}")

    def handle_raw(self, obj: Any) -> dict[str, Any] | None:
        """Handle one decoded wire message.

        Returns:
            The wire form of the response, or None when nothing is to be sent
        """
        if isinstance(obj, list):
            return error_response(
                None, INVALID_REQUEST, "Invalid Request: batch messages are not supported"
            )
        try:
            message = RpcMessage.parse(obj)
        except RpcError as e:
            request_id = obj.get("id") if isinstance(obj, dict) else None
            if isinstance(request_id, bool) or not isinstance(request_id, int | float | str | None):
                request_id = None
            return RpcMessage.failure(request_id, e).to_dict()
        response = self.handle(message)
        return response.to_dict() if response is not None else None

    def handle(self, message: RpcMessage) -> RpcMessage | None:
        """Dispatch one parsed message.

        Notifications and client responses produce no reply.

        Args:
            message: Parsed message

        Returns:
            Response message, or None
        """
        if message.is_response:
            logger.debug(f"Ignoring client response id={message.id}")
            return None
        if message.is_notification:
            logger.debug(f"Notification {message.method}")
            return None

        try:
            result = self._dispatch(message.method or "", message.params)
        except RpcError as e:
            logger.debug(f"Request {message.method} id={message.id} failed: {e}")
            return RpcMessage.failure(message.id, e)
        except Exception as e:
            logger.exception(f"Internal error handling {message.method}")
            return RpcMessage.failure(message.id, RpcError(INTERNAL_ERROR, f"Internal error: {e}"))
        return RpcMessage.success(message.id, result)

    def list_tools(self) -> list[ToolDescriptor]:
        return [tool.descriptor for tool in self.tools.values()]

    def call_tool(self, name: str, arguments: Any) -> ToolResult:
        """Validate arguments and run a tool.

        Raises:
            RpcError: INVALID_PARAMS for unknown tools or invalid arguments
        """
        tool = self.tools.get(name)
        if tool is None:
            raise RpcError(INVALID_PARAMS, f"Unknown tool: {name}")
        try:
            normalized = validate_arguments(tool.descriptor.input_schema, arguments)
        except ValueError as e:
            raise RpcError(INVALID_PARAMS, f"Invalid arguments for tool {name}: {e}") from e

        try:
            result = tool.handler(normalized)
        except ToolError as e:
            logger.debug(f"Tool {name} failed: {e}")
            return ToolResult.error(str(e))
        logger.debug(f"Tool {name} succeeded")
        return result

    def _dispatch(self, method: str, params: Any) -> Any:
        if params is not None and not isinstance(params, dict):
            raise RpcError(INVALID_PARAMS, "params must be an object")
        params = params or {}

        if method == "initialize":
            return {
                "protocolVersion": PROTOCOL_VERSION,
                "capabilities": {"tools": {"listChanged": False}},
                "serverInfo": {"name": self.name, "version": self.version},
            }
        if method == "ping":
            return {}
        if method == "tools/list":
            return {"tools": [descriptor.to_dict() for descriptor in self.list_tools()]}
        if method == "tools/call":
            name = params.get("name")
            if not isinstance(name, str):
                raise RpcError(INVALID_PARAMS, "tools/call requires a string 'name'")
            arguments = params.get("arguments", {})
            return self.call_tool(name, arguments).to_dict()
        raise RpcError(METHOD_NOT_FOUND, f"Method not found: {method}")
