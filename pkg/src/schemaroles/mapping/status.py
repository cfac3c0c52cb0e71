# this_file: schemaroles/mapping/status.py
"""Mapping file status classification."""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path

from loguru import logger

from schemaroles.mapping.codec import MappingParseError, deserialize_mapping
from schemaroles.mapping.validator import MappingValidationError


class StatusKind(StrEnum):
    VALID = "VALID"
    MISSING = "MISSING"
    EMPTY = "EMPTY"
    ERROR = "ERROR"


@dataclass(frozen=True)
class MappingStatus:
    """Status of one table's mapping file, with the first diagnostic."""

    kind: StatusKind
    detail: str = ""

    @property
    def needs_mapping(self) -> bool:
        return self.kind is not StatusKind.VALID

    def to_dict(self) -> dict[str, str]:
        return {"status": self.kind.value, "detail": self.detail}


def mapping_path(output_dir: Path | str, db_name: str, table_name: str) -> Path:
    """Location of a table's mapping file: ``output_dir/db_name/table_name.json``."""
    return Path(output_dir) / db_name / f"{table_name}.json"


def classify_mapping_file(output_dir: Path | str, db_name: str, table_name: str) -> MappingStatus:
    """Classify a table's mapping file without modifying anything.

    Args:
        output_dir: Output folder root
        db_name: Database name (subfolder)
        table_name: Table name, exact spelling

    Returns:
        MISSING, ERROR (unreadable, malformed, invalid, wrong table_name),
        EMPTY or VALID
    """
    path = mapping_path(output_dir, db_name, table_name)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        return MappingStatus(StatusKind.MISSING, f"no mapping file at {path}")
    except OSError as e:
        logger.debug(f"Cannot read {path}: {e}")
        return MappingStatus(StatusKind.ERROR, f"unreadable: {e.strerror or e}")

    try:
        output = deserialize_mapping(data)
    except MappingParseError as e:
        return MappingStatus(StatusKind.ERROR, f"malformed JSON: {e}")
    except MappingValidationError as e:
        return MappingStatus(StatusKind.ERROR, f"invalid mapping: {e.violations[0]}")

    if output.table_name != table_name:
        return MappingStatus(
            StatusKind.ERROR,
            f"table_name mismatch: file declares {output.table_name!r}, expected {table_name!r}",
        )
    if output.is_empty:
        return MappingStatus(StatusKind.EMPTY, "mappings array is empty")
    return MappingStatus(StatusKind.VALID, f"{len(output.mappings)} mappings")
