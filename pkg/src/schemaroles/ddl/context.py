# this_file: schemaroles/ddl/context.py
"""Per-table foreign-key context derivation."""

from __future__ import annotations

from loguru import logger

from schemaroles.ddl.model import ForeignKey, Schema, TableContext


def _resolve(schema: Schema, fk: ForeignKey) -> ForeignKey:
    """Fill an omitted referenced column list with the referenced primary key."""
    if fk.referenced_columns or not schema.has_table(fk.referenced_table):
        return fk
    primary_key = schema.table(fk.referenced_table).primary_key
    if len(primary_key) != len(fk.local_columns):
        return fk
    return ForeignKey(
        local_columns=fk.local_columns,
        referenced_table=fk.referenced_table,
        referenced_columns=primary_key,
    )


def table_context(schema: Schema, table_name: str) -> TableContext:
    """Derive the FK neighbourhood of one table.

    Inbound references are ordered by referencing table name (case-insensitive),
    so the result does not depend on the order of CREATE TABLE statements.
    A self-referencing FK appears in both lists.

    Args:
        schema: Parsed schema
        table_name: Table to analyze, matched case-insensitively

    Returns:
        The table with its outbound and inbound foreign keys

    Raises:
        TableNotFoundError: If the schema has no such table
    """
    table = schema.table(table_name)
    outbound = tuple(_resolve(schema, fk) for fk in table.foreign_keys)

    inbound: list[tuple[str, ForeignKey]] = []
    for other in schema.tables:
        for fk in other.foreign_keys:
            if fk.referenced_table.lower() == table.name.lower():
                inbound.append((other.name, _resolve(schema, fk)))
    inbound.sort(key=lambda ref: (ref[0].lower(), ref[0]))

    logger.debug(f"Context for {table.name}: {len(outbound)} outbound, {len(inbound)} inbound FKs")
    return TableContext(table=table, outbound_refs=outbound, inbound_refs=tuple(inbound))


def table_contexts(schema: Schema) -> list[TableContext]:
    """Contexts for every table, in schema order."""
    return [table_context(schema, table.name) for table in schema.tables]
