# this_file: schemaroles/mapping/__init__.py
"""Table mapping records: model, validation, JSON codec and file status."""

from schemaroles.mapping.codec import (
    MappingParseError,
    MappingSerializationError,
    deserialize_mapping,
    serialize_mapping,
)
from schemaroles.mapping.model import REQUIRED_ROLES, RolesetMapping, TableMappingOutput
from schemaroles.mapping.status import (
    MappingStatus,
    StatusKind,
    classify_mapping_file,
    mapping_path,
)
from schemaroles.mapping.validator import MappingValidationError, MappingValidator, Violation

__all__ = [
    "REQUIRED_ROLES",
    "MappingParseError",
    "MappingSerializationError",
    "MappingStatus",
    "MappingValidationError",
    "MappingValidator",
    "RolesetMapping",
    "StatusKind",
    "TableMappingOutput",
    "Violation",
    "classify_mapping_file",
    "deserialize_mapping",
    "mapping_path",
    "serialize_mapping",
]
