# this_file: schemaroles/mcp/propbank.py
"""PropBank query tools as an MCP server."""

from __future__ import annotations

from typing import Any

from schemaroles import __version__
from schemaroles.frames.index import DEFAULT_MAX_RESULTS, FrameIndex, FrameNotFoundError
from schemaroles.mcp.protocol import McpServer, Tool, ToolDescriptor, ToolError, ToolResult

SERVER_NAME = "schemaroles-propbank"

SEARCH_BY_LEMMA = ToolDescriptor(
    name="search_by_lemma",
    description=(
        "Find PropBank rolesets whose lemma or alias matches a verb base form or one of its "
        "variants. Returns sense_id, definition and roles for each roleset."
    ),
    input_schema={
        "type": "object",
        "properties": {
            "lemma": {"type": "string", "description": "Verb base form, e.g. 'order'"},
            "max_results": {
                "type": "integer",
                "description": "Maximum number of rolesets to return",
                "default": DEFAULT_MAX_RESULTS,
                "minimum": 1,
            },
        },
        "required": ["lemma"],
        "additionalProperties": False,
    },
)

SEARCH_BY_SENSE_ID = ToolDescriptor(
    name="search_by_sense_id",
    description=(
        "Retrieve one PropBank roleset by its identifier (e.g. 'order.02') with roles, "
        "lexical links and, optionally, annotated examples."
    ),
    input_schema={
        "type": "object",
        "properties": {
            "sense_id": {"type": "string", "description": "Roleset identifier, e.g. 'order.02'"},
            "include_examples": {
                "type": "boolean",
                "description": "Include annotated example sentences",
                "default": True,
            },
        },
        "required": ["sense_id"],
        "additionalProperties": False,
    },
)


class PropBankTools:
    """Handlers answering from a shared, immutable FrameIndex."""

    def __init__(self, index: FrameIndex):
        self.index = index

    def search_by_lemma(self, arguments: dict[str, Any]) -> ToolResult:
        lemma = arguments["lemma"]
        rolesets = self.index.search_by_lemma(lemma, arguments["max_results"])
        return ToolResult.json(
            {
                "lemma": lemma,
                "count": len(rolesets),
                "rolesets": [roleset.to_summary_dict() for roleset in rolesets],
            }
        )

    def search_by_sense_id(self, arguments: dict[str, Any]) -> ToolResult:
        try:
            roleset = self.index.search_by_sense_id(
                arguments["sense_id"], arguments["include_examples"]
            )
        except FrameNotFoundError as e:
            raise ToolError(str(e)) from e
        return ToolResult.json(roleset.to_dict())


def create_propbank_server(index: FrameIndex) -> McpServer:
    """Build the read-only PropBank MCP server over a loaded index."""
    tools = PropBankTools(index)
    return McpServer(
        SERVER_NAME,
        __version__,
        [
            Tool(SEARCH_BY_LEMMA, tools.search_by_lemma),
            Tool(SEARCH_BY_SENSE_ID, tools.search_by_sense_id),
        ],
    )
