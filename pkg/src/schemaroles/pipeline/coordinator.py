# this_file: schemaroles/pipeline/coordinator.py
"""Coordinator: per-table mapping status and the pending-work list."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from loguru import logger
from rich.table import Table as RichTable

from schemaroles.ddl.model import Schema
from schemaroles.mapping.status import MappingStatus, StatusKind, classify_mapping_file

STATUS_STYLES = {
    StatusKind.VALID: "green",
    StatusKind.MISSING: "yellow",
    StatusKind.EMPTY: "yellow",
    StatusKind.ERROR: "red",
}


@dataclass(frozen=True)
class CoordinatorReport:
    """Status of every table of a schema in one output folder.

    Attributes:
        db_name: Database name (output subfolder)
        statuses: table name -> status, in schema order
        todo: Tables whose status is MISSING, EMPTY or ERROR, in schema order
    """

    db_name: str
    statuses: dict[str, MappingStatus] = field(default_factory=dict)
    todo: tuple[str, ...] = ()

    @property
    def is_complete(self) -> bool:
        return not self.todo

    def count(self, kind: StatusKind) -> int:
        return sum(1 for status in self.statuses.values() if status.kind is kind)

    def to_dict(self) -> dict[str, Any]:
        return {
            "db_name": self.db_name,
            "statuses": {name: status.to_dict() for name, status in self.statuses.items()},
            "todo": list(self.todo),
        }

    def to_rich_table(self) -> RichTable:
        """Render as a rich table (table, status, detail)."""
        table = RichTable(title=f"Mapping status: {self.db_name}")
        table.add_column("Table", style="bold")
        table.add_column("Status")
        table.add_column("Detail", overflow="fold")
        for name, status in self.statuses.items():
            style = STATUS_STYLES[status.kind]
            table.add_row(name, f"[{style}]{status.kind.value}[/{style}]", status.detail)
        return table


def _unreadable_reason(db_dir: Path) -> str | None:
    """Explain why an existing output folder cannot be inspected, if it cannot."""
    for directory in (db_dir.parent, db_dir):
        if not directory.exists():
            return None
        if not directory.is_dir():
            return f"output path {directory} is not a directory"
        if not os.access(directory, os.R_OK | os.X_OK):
            return f"output directory {directory} is not readable"
    return None


def coordinate(schema: Schema, output_dir: Path | str, db_name: str) -> CoordinatorReport:
    """Classify the mapping file of every table. Read-only.

    A missing output folder means every table is MISSING; an output folder
    that exists but cannot be read makes every table ERROR.

    Args:
        schema: Parsed schema
        output_dir: Output folder root
        db_name: Database name

    Returns:
        Report with statuses for exactly the schema's tables
    """
    output_dir = Path(output_dir)
    reason = _unreadable_reason(output_dir / db_name)

    statuses: dict[str, MappingStatus] = {}
    for table in schema.tables:
        if reason is not None:
            statuses[table.name] = MappingStatus(StatusKind.ERROR, reason)
        else:
            statuses[table.name] = classify_mapping_file(output_dir, db_name, table.name)

    todo = tuple(name for name, status in statuses.items() if status.needs_mapping)
    report = CoordinatorReport(db_name=db_name, statuses=statuses, todo=todo)
    logger.debug(
        f"Coordinated {db_name}: {report.count(StatusKind.VALID)}/{len(statuses)} valid, "
        f"todo={list(todo)}"
    )
    return report
