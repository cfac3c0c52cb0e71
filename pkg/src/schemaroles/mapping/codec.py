# this_file: schemaroles/mapping/codec.py
"""Deterministic JSON encoding of mapping records."""

from __future__ import annotations

import json

from loguru import logger

from schemaroles.mapping.model import TableMappingOutput
from schemaroles.mapping.validator import (
    MappingValidationError,
    MappingValidator,
    Violation,
    build_output,
)


class MappingParseError(Exception):
    """Raised when a mapping document is not well-formed UTF-8 JSON."""

    def __init__(self, message: str, position: int | None = None):
        """Initialize parse error.

        Args:
            message: Error description
            position: Character position of the error, when known
        """
        self.position = position
        if position is not None:
            super().__init__(f"{message} at position {position}")
        else:
            super().__init__(message)


class MappingSerializationError(Exception):
    """Raised when a record violating the format is serialized."""

    def __init__(self, invariant: str, violations: list[Violation]):
        """Initialize serialization error.

        Args:
            invariant: Name of the first violated invariant
            violations: All violations
        """
        self.invariant = invariant
        self.violations = violations
        super().__init__(f"Refusing to serialize: {invariant} violated ({violations[0]})")


def serialize_mapping(output: TableMappingOutput) -> bytes:
    """Encode a record as a deterministic JSON document.

    Keys follow the record field order, mappings are sorted by confidence
    descending then sense_id ascending, roles by label, floats use Python's
    shortest round-trip repr. The document ends with a newline.

    Args:
        output: Record to encode

    Returns:
        UTF-8 bytes

    Raises:
        MappingSerializationError: If the record violates the format
    """
    violations = MappingValidator().validate(output)
    if violations:
        raise MappingSerializationError(violations[0].invariant, violations)
    text = json.dumps(output.to_dict(), indent=2, ensure_ascii=False, allow_nan=False)
    return (text + "\n").encode("utf-8")


def deserialize_mapping(data: bytes | str) -> TableMappingOutput:
    """Decode and validate a mapping document.

    Args:
        data: Document bytes (UTF-8) or text

    Returns:
        The record

    Raises:
        MappingParseError: If the data is not valid UTF-8 JSON
        MappingValidationError: If the document violates the format
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise MappingParseError(f"Not UTF-8: {e.reason}", e.start) from e
    try:
        document = json.loads(data)
    except json.JSONDecodeError as e:
        raise MappingParseError(f"Malformed JSON: {e.msg}", e.pos) from e

    violations = MappingValidator().validate_document(document)
    if violations:
        raise MappingValidationError(violations)
    output = build_output(document)
    logger.debug(f"Decoded mapping for {output.table_name}: {len(output.mappings)} mappings")
    return output
