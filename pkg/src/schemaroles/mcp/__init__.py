# this_file: schemaroles/mcp/__init__.py
"""Model Context Protocol servers: PropBank queries and a sandboxed filesystem."""

from schemaroles.mcp.filesystem import (
    FsServerConfig,
    Sandbox,
    SandboxError,
    create_filesystem_server,
)
from schemaroles.mcp.http import SESSION_HEADER, create_http_app, serve_http
from schemaroles.mcp.propbank import create_propbank_server
from schemaroles.mcp.protocol import (
    PROTOCOL_VERSION,
    McpServer,
    RpcError,
    RpcMessage,
    Tool,
    ToolDescriptor,
    ToolError,
    ToolResult,
)
from schemaroles.mcp.stdio import serve_stdio

__all__ = [
    "PROTOCOL_VERSION",
    "SESSION_HEADER",
    "FsServerConfig",
    "McpServer",
    "RpcError",
    "RpcMessage",
    "Sandbox",
    "SandboxError",
    "Tool",
    "ToolDescriptor",
    "ToolError",
    "ToolResult",
    "create_filesystem_server",
    "create_http_app",
    "create_propbank_server",
    "serve_http",
    "serve_stdio",
]
