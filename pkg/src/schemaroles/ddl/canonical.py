# this_file: schemaroles/ddl/canonical.py
"""Canonical DDL emitter.

Parsing the emitted text yields a Schema equal to the one rendered, which
makes the output usable as a normal form for comparisons and fixtures.
"""

from __future__ import annotations

from schemaroles.ddl.model import Column, ForeignKey, Schema, Table

INDENT = "    "


def quote_identifier(name: str) -> str:
    """Double-quote an identifier, doubling embedded quotes."""
    return '"' + name.replace('"', '""') + '"'


def _column_list(names: tuple[str, ...]) -> str:
    return "(" + ", ".join(quote_identifier(name) for name in names) + ")"


def _render_column(column: Column) -> str:
    parts = [quote_identifier(column.name)]
    if column.declared_type:
        parts.append(column.declared_type)
    if not column.nullable:
        parts.append("NOT NULL")
    if column.default_expr is not None:
        parts.append(f"DEFAULT {column.default_expr}")
    parts.extend(column.constraints)
    return " ".join(parts)


def _render_foreign_key(fk: ForeignKey) -> str:
    target = quote_identifier(fk.referenced_table)
    text = f"FOREIGN KEY {_column_list(fk.local_columns)} REFERENCES {target}"
    if fk.referenced_columns:
        text += f" {_column_list(fk.referenced_columns)}"
    return text


def render_table(table: Table) -> str:
    """Render one table as a canonical CREATE TABLE statement."""
    items = [_render_column(column) for column in table.columns]
    if table.primary_key:
        items.append(f"PRIMARY KEY {_column_list(table.primary_key)}")
    items.extend(_render_foreign_key(fk) for fk in table.foreign_keys)
    items.extend(table.constraints)

    if not items:
        return f"CREATE TABLE {quote_identifier(table.name)} ();"
    body = ",\n".join(INDENT + item for item in items)
    return f"CREATE TABLE {quote_identifier(table.name)} (\n{body}\n);"


def to_canonical_ddl(schema: Schema) -> str:
    """Render a schema as canonical DDL.

    Identifiers are always double-quoted, key clauses are emitted at table level
    and declared types, defaults and opaque constraints are reproduced verbatim.

    Args:
        schema: Schema to render

    Returns:
        DDL text, one statement per table separated by blank lines
    """
    if not schema.tables:
        return ""
    return "\n\n".join(render_table(table) for table in schema.tables) + "\n"
