# this_file: schemaroles/mapping/validator.py
"""Mapping record validation."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

from loguru import logger

from schemaroles.ddl.model import Table
from schemaroles.frames.model import is_valid_role_label
from schemaroles.mapping.model import REQUIRED_ROLES, RolesetMapping, TableMappingOutput


@dataclass(frozen=True)
class Violation:
    """One broken rule of the mapping format.

    Attributes:
        invariant: Short rule name, e.g. "confidence-range"
        message: Human-readable description
        location: Where in the document, e.g. "mappings[0].confidence"
    """

    invariant: str
    message: str
    location: str = ""

    def __str__(self) -> str:
        return f"{self.location}: {self.message}" if self.location else self.message


class MappingValidationError(Exception):
    """Raised when a mapping document violates the format."""

    def __init__(self, violations: list[Violation]):
        """Initialize validation error.

        Args:
            violations: Every violation found, in document order
        """
        self.violations = violations
        listed = "; ".join(str(violation) for violation in violations)
        super().__init__(f"{len(violations)} mapping violation(s): {listed}")


def _is_number(value: Any) -> bool:
    return isinstance(value, int | float) and not isinstance(value, bool)


class MappingValidator:
    """Validates mapping records and raw mapping documents.

    In strict mode role values are also compared with the column names of a
    supplied table; mismatches are collected as warnings, never as violations.
    """

    def __init__(self, strict: bool = False, table: Table | None = None):
        """Initialize validator.

        Args:
            strict: Cross-check role values against the table's columns
            table: Table the mapping belongs to (used in strict mode)
        """
        self.strict = strict
        self.table = table
        self.violations: list[Violation] = []
        self.warnings: list[str] = []
        logger.debug(f"Initialized MappingValidator with strict={strict}")

    def validate(self, output: TableMappingOutput) -> list[Violation]:
        """Validate a mapping record.

        Args:
            output: Record to check

        Returns:
            List of violations (empty if valid)
        """
        self.violations = []
        self.warnings = []
        if not output.table_name:
            self._add("table-name", "table_name must be non-empty", "table_name")

        seen: set[str] = set()
        for position, mapping in enumerate(output.mappings):
            location = f"mappings[{position}]"
            self._validate_mapping(mapping, location)
            if mapping.sense_id in seen:
                message = f"duplicate sense_id {mapping.sense_id!r}"
                self._add("distinct-sense-ids", message, location)
            seen.add(mapping.sense_id)

        if self.strict and self.table is not None:
            self._check_grounding(output)
        return self.violations

    def validate_document(self, document: Any) -> list[Violation]:
        """Validate a decoded JSON document, types first, then record rules.

        Args:
            document: Result of json.loads

        Returns:
            List of violations (empty if the document converts to a valid record)
        """
        self.violations = []
        self.warnings = []
        if not isinstance(document, dict):
            self._add("type", "document must be a JSON object")
            return self.violations

        table_name = document.get("table_name")
        if "table_name" not in document:
            self._add("missing-field", "missing field table_name", "table_name")
        elif not isinstance(table_name, str):
            self._add("type", "table_name must be a string", "table_name")

        mappings = document.get("mappings")
        if "mappings" not in document:
            self._add("missing-field", "missing field mappings", "mappings")
        elif not isinstance(mappings, list):
            self._add("type", "mappings must be an array", "mappings")
        else:
            for position, item in enumerate(mappings):
                self._check_mapping_types(item, f"mappings[{position}]")

        if self.violations:
            return self.violations
        return self.validate(build_output(document))

    def _check_mapping_types(self, item: Any, location: str) -> None:
        if not isinstance(item, dict):
            self._add("type", "mapping must be a JSON object", location)
            return
        for key in ("sense_id", "lemma", "definition"):
            if key not in item:
                self._add("missing-field", f"missing field {key}", location)
            elif not isinstance(item[key], str):
                self._add("type", f"{key} must be a string", f"{location}.{key}")

        if "roles" not in item:
            self._add("missing-field", "missing field roles", location)
        elif not isinstance(item["roles"], dict):
            self._add("type", "roles must be an object", f"{location}.roles")
        else:
            for label, value in item["roles"].items():
                if not isinstance(value, str):
                    self._add("type", "role value must be a string", f"{location}.roles.{label}")

        if "confidence" not in item:
            self._add("missing-field", "missing field confidence", location)
        elif not _is_number(item["confidence"]):
            self._add("type", "confidence must be a number", f"{location}.confidence")

    def _validate_mapping(self, mapping: RolesetMapping, location: str) -> None:
        if not mapping.sense_id:
            self._add("sense-id-format", "sense_id must be non-empty", f"{location}.sense_id")
        if not mapping.lemma:
            self._add("lemma", "lemma must be non-empty", f"{location}.lemma")
        elif mapping.sense_id and not mapping.sense_id.startswith(mapping.lemma + "."):
            self._add(
                "sense-id-format",
                f"sense_id {mapping.sense_id!r} does not start with {mapping.lemma + '.'!r}",
                f"{location}.sense_id",
            )

        for label in REQUIRED_ROLES:
            if label not in mapping.roles:
                self._add("required-roles", f"roles must contain {label}", f"{location}.roles")
        for label in mapping.roles:
            if not is_valid_role_label(label):
                self._add("role-label", f"invalid role label {label!r}", f"{location}.roles")

        confidence = mapping.confidence
        if not _is_number(confidence) or math.isnan(confidence) or not 0.0 <= confidence <= 1.0:
            self._add(
                "confidence-range",
                f"confidence {confidence!r} outside [0.0, 1.0]",
                f"{location}.confidence",
            )

    def _check_grounding(self, output: TableMappingOutput) -> None:
        assert self.table is not None
        columns = {name.lower() for name in self.table.column_names}
        for position, mapping in enumerate(output.mappings):
            for label, value in mapping.roles.items():
                if value.lower() not in columns:
                    warning = (
                        f"mappings[{position}].roles.{label}: {value!r} is not a column of "
                        f"{self.table.name}"
                    )
                    self.warnings.append(warning)
                    logger.warning(f"Grounding warning: {warning}")

    def _add(self, invariant: str, message: str, location: str = "") -> None:
        violation = Violation(invariant=invariant, message=message, location=location)
        self.violations.append(violation)
        logger.debug(f"Mapping violation: {violation}")


def build_output(document: Mapping[str, Any]) -> TableMappingOutput:
    """Convert a type-checked document into a record; unknown keys are dropped."""
    return TableMappingOutput(
        table_name=document["table_name"],
        mappings=tuple(
            RolesetMapping(
                sense_id=item["sense_id"],
                lemma=item["lemma"],
                definition=item["definition"],
                roles=dict(item["roles"]),
                confidence=item["confidence"],
            )
            for item in document["mappings"]
        ),
    )
