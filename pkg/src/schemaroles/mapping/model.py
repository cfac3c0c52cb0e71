# this_file: schemaroles/mapping/model.py
"""Per-table mapping records."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

from schemaroles.frames.model import role_sort_key

REQUIRED_ROLES = ("ARG0", "ARG1")


@dataclass(frozen=True)
class RolesetMapping:
    """One roleset assigned to a table.

    Construction does not enforce the record invariants; MappingValidator
    reports them so that every violation can be listed at once.

    Attributes:
        sense_id: Roleset identifier ("order.02")
        lemma: Roleset lemma ("order")
        definition: Roleset definition
        roles: Role label -> column name, or free-text role description
        confidence: Semantic fit in [0, 1]
    """

    sense_id: str
    lemma: str
    definition: str
    roles: Mapping[str, str] = field(default_factory=dict)
    confidence: float = 0.0

    def __post_init__(self) -> None:
        ordered = dict(sorted(self.roles.items(), key=lambda item: role_sort_key(item[0])))
        object.__setattr__(self, "roles", ordered)

    def to_dict(self) -> dict[str, Any]:
        return {
            "sense_id": self.sense_id,
            "lemma": self.lemma,
            "definition": self.definition,
            "roles": dict(self.roles),
            "confidence": float(self.confidence),
        }


def mapping_order_key(mapping: RolesetMapping) -> tuple[float, str]:
    """Confidence descending, then sense_id ascending."""
    return (-mapping.confidence, mapping.sense_id)


@dataclass(frozen=True)
class TableMappingOutput:
    """All roleset mappings of one table.

    Mappings are kept in output order (confidence descending, sense_id
    ascending) whatever order they were given in.
    """

    table_name: str
    mappings: tuple[RolesetMapping, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "mappings", tuple(sorted(self.mappings, key=mapping_order_key)))

    @property
    def is_empty(self) -> bool:
        return not self.mappings

    def sense_ids(self) -> list[str]:
        return [mapping.sense_id for mapping in self.mappings]

    def to_dict(self) -> dict[str, Any]:
        return {
            "table_name": self.table_name,
            "mappings": [mapping.to_dict() for mapping in self.mappings],
        }
