# this_file: schemaroles/ddl/__init__.py
"""DDL parsing and table context derivation."""

from schemaroles.ddl.canonical import to_canonical_ddl
from schemaroles.ddl.context import table_context, table_contexts
from schemaroles.ddl.model import (
    Column,
    ForeignKey,
    Schema,
    Table,
    TableContext,
    TableNotFoundError,
)
from schemaroles.ddl.parser import DDLParseError, DDLParser, parse_ddl

__all__ = [
    "Column",
    "DDLParseError",
    "DDLParser",
    "ForeignKey",
    "Schema",
    "Table",
    "TableContext",
    "TableNotFoundError",
    "parse_ddl",
    "table_context",
    "table_contexts",
    "to_canonical_ddl",
]
