# this_file: schemaroles/mcp/stdio.py
"""Newline-delimited JSON-RPC over standard input/output."""

from __future__ import annotations

import io
import json
import sys
from typing import Any, TextIO

from loguru import logger

from schemaroles.mcp.protocol import PARSE_ERROR, McpServer, error_response


def encode_message(message: dict[str, Any]) -> str:
    """Compact single-line wire form, newline-terminated."""
    return json.dumps(message, ensure_ascii=False, separators=(",", ":")) + "\n"


def serve_stdio(
    server: McpServer, stdin: TextIO | None = None, stdout: TextIO | None = None
) -> int:
    """Serve one client over newline-delimited JSON-RPC until the input closes.

    Messages are processed in arrival order. A line that is not JSON gets a
    parse-error response and the loop continues. Nothing but protocol
    messages is written to stdout.

    Args:
        server: Server handling the messages
        stdin: Input stream (default: UTF-8 view of sys.stdin)
        stdout: Output stream (default: UTF-8 view of sys.stdout)

    Returns:
        Exit status 0 once the input stream is exhausted
    """
    if stdin is None:
        stdin = io.TextIOWrapper(sys.stdin.buffer, encoding="utf-8", errors="replace")
    if stdout is None:
        stdout = io.TextIOWrapper(sys.stdout.buffer, encoding="utf-8", write_through=True)

    logger.info(f"Serving {server.name} over stdio")
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            logger.warning(f"Unparseable message: {e}")
            response: dict[str, Any] | None = error_response(
                None, PARSE_ERROR, f"Parse error: {e.msg}"
            )
        else:
            response = server.handle_raw(obj)

        if response is not None:
            stdout.write(encode_message(response))
            stdout.flush()

    logger.info("stdin closed, stdio server exiting")
    return 0
