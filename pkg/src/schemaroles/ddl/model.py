# this_file: schemaroles/ddl/model.py
"""Relational schema data model for schemaroles."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


class TableNotFoundError(KeyError):
    """Raised when a table name does not match any table of a schema."""

    def __init__(self, table_name: str, source_name: str = ""):
        """Initialize not-found error.

        Args:
            table_name: The name that was looked up
            source_name: Schema source, for the message
        """
        self.table_name = table_name
        self.source_name = source_name
        super().__init__(table_name)

    def __str__(self) -> str:
        where = f" in schema '{self.source_name}'" if self.source_name else ""
        return f"Table not found{where}: {self.table_name}"


@dataclass(frozen=True)
class Column:
    """A column definition.

    Attributes:
        name: Column name, original spelling
        declared_type: Type text verbatim from the DDL ("" when omitted)
        nullable: False for NOT NULL and primary key columns
        default_expr: DEFAULT expression text, verbatim
        constraints: Unsupported column clauses kept as opaque text (CHECK, UNIQUE, COLLATE, ...)
    """

    name: str
    declared_type: str = ""
    nullable: bool = True
    default_expr: str | None = None
    constraints: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("Column name cannot be empty")

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "declared_type": self.declared_type,
            "nullable": self.nullable,
            "default_expr": self.default_expr,
            "constraints": list(self.constraints),
        }


@dataclass(frozen=True)
class ForeignKey:
    """A foreign key reference.

    Attributes:
        local_columns: Referencing columns of the owning table
        referenced_table: Name of the referenced table
        referenced_columns: Referenced columns; empty means the referenced primary key
    """

    local_columns: tuple[str, ...]
    referenced_table: str
    referenced_columns: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.local_columns:
            raise ValueError("Foreign key needs at least one local column")
        if self.referenced_columns and len(self.referenced_columns) != len(self.local_columns):
            raise ValueError(
                f"Foreign key column count mismatch: {list(self.local_columns)} -> "
                f"{self.referenced_table}{list(self.referenced_columns)}"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "local_columns": list(self.local_columns),
            "referenced_table": self.referenced_table,
            "referenced_columns": list(self.referenced_columns),
        }


@dataclass(frozen=True)
class Table:
    """A table definition.

    Attributes:
        name: Table name, original spelling
        columns: Columns in declaration order
        primary_key: Primary key column names
        foreign_keys: Column- and table-level foreign keys in declaration order
        constraints: Unsupported table-level clauses kept as opaque text
    """

    name: str
    columns: tuple[Column, ...] = ()
    primary_key: tuple[str, ...] = ()
    foreign_keys: tuple[ForeignKey, ...] = ()
    constraints: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("Table name cannot be empty")
        lowered = [column.name.lower() for column in self.columns]
        if len(lowered) != len(set(lowered)):
            raise ValueError(f"Duplicate column names in table {self.name}")
        for key_column in self.primary_key:
            if key_column.lower() not in lowered:
                raise ValueError(
                    f"Primary key column {key_column} not defined in table {self.name}"
                )

    def column(self, name: str) -> Column | None:
        """Case-insensitive column lookup."""
        for column in self.columns:
            if column.name.lower() == name.lower():
                return column
        return None

    def declared_name(self, name: str) -> str:
        """Declared spelling of a column name, or the name itself when undeclared."""
        column = self.column(name)
        return column.name if column is not None else name

    @property
    def column_names(self) -> list[str]:
        return [column.name for column in self.columns]

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "columns": [column.to_dict() for column in self.columns],
            "primary_key": list(self.primary_key),
            "foreign_keys": [fk.to_dict() for fk in self.foreign_keys],
            "constraints": list(self.constraints),
        }


@dataclass(frozen=True)
class Schema:
    """A parsed DDL schema.

    Attributes:
        tables: Tables in declaration order
        source_name: Where the DDL came from (file name or label)
    """

    tables: tuple[Table, ...] = ()
    source_name: str = ""

    def __post_init__(self) -> None:
        lowered = [table.name.lower() for table in self.tables]
        if len(lowered) != len(set(lowered)):
            raise ValueError(f"Duplicate table names in schema {self.source_name!r}")

    def table(self, name: str) -> Table:
        """Case-insensitive table lookup.

        Raises:
            TableNotFoundError: If no table matches
        """
        for table in self.tables:
            if table.name.lower() == name.lower():
                return table
        raise TableNotFoundError(name, self.source_name)

    def has_table(self, name: str) -> bool:
        return any(table.name.lower() == name.lower() for table in self.tables)

    @property
    def table_names(self) -> list[str]:
        return [table.name for table in self.tables]

    def to_dict(self) -> dict[str, Any]:
        return {
            "source_name": self.source_name,
            "tables": [table.to_dict() for table in self.tables],
        }


@dataclass(frozen=True)
class TableContext:
    """A table together with its foreign-key neighbourhood.

    Attributes:
        table: The table itself
        outbound_refs: The table's foreign keys, referenced columns resolved
        inbound_refs: (referencing table name, foreign key) for every FK in the schema
            pointing at this table, self-references included
    """

    table: Table
    outbound_refs: tuple[ForeignKey, ...] = ()
    inbound_refs: tuple[tuple[str, ForeignKey], ...] = ()

    @property
    def name(self) -> str:
        return self.table.name

    def foreign_key_columns(self) -> list[str]:
        """Local columns taking part in an outbound FK, declared spelling, in declaration order."""
        columns: list[str] = []
        for fk in self.outbound_refs:
            for name in fk.local_columns:
                column = self.table.declared_name(name)
                if column not in columns:
                    columns.append(column)
        return columns

    def to_dict(self) -> dict[str, Any]:
        return {
            "table": self.table.to_dict(),
            "outbound_refs": [fk.to_dict() for fk in self.outbound_refs],
            "inbound_refs": [
                {"table": name, "foreign_key": fk.to_dict()} for name, fk in self.inbound_refs
            ],
        }
