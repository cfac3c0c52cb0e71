# this_file: schemaroles/frames/model.py
"""PropBank roleset data model for schemaroles."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Any

ROLE_LABEL_PATTERN = re.compile(r"ARG[0-9A]|ARGM-[A-Z]+")
CORE_ROLE_PATTERN = re.compile(r"ARG[0-4]")


def is_valid_role_label(label: str) -> bool:
    """Check a label against the numbered/modifier argument grammar."""
    return ROLE_LABEL_PATTERN.fullmatch(label) is not None


def role_sort_key(label: str) -> tuple[int, str]:
    """Order role labels: ARG0-ARG9, ARGA, then ARGM-* alphabetically."""
    if label.startswith("ARGM-"):
        return (2, label)
    if label == "ARGA":
        return (1, label)
    return (0, label)


@dataclass(frozen=True)
class Role:
    """One argument role of a roleset.

    Attributes:
        label: ARG0-ARG9, ARGA or ARGM-<function>
        description: Role description from the frame file (e.g. "orderer")
    """

    label: str
    description: str

    def __post_init__(self) -> None:
        if not is_valid_role_label(self.label):
            raise ValueError(f"Invalid role label: {self.label!r}")

    def to_dict(self) -> dict[str, str]:
        return {"label": self.label, "description": self.description}


@dataclass(frozen=True)
class FrameExample:
    """An annotated example sentence.

    Attributes:
        text: The sentence
        name: Optional example name from the frame file
        argument_spans: (label, span text) pairs, in document order
    """

    text: str
    name: str = ""
    argument_spans: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("Example text cannot be empty")

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "text": self.text,
            "arguments": [{"label": label, "text": span} for label, span in self.argument_spans],
        }


@dataclass(frozen=True)
class LexLink:
    """Cross-reference to another lexical resource (VerbNet, FrameNet, ...)."""

    resource: str
    identifier: str

    def to_dict(self) -> dict[str, str]:
        return {"resource": self.resource, "identifier": self.identifier}


@dataclass(frozen=True)
class Roleset:
    """One PropBank frame sense.

    Attributes:
        sense_id: Unique identifier such as "order.02"
        lemma: Base form, the part of sense_id before the "."
        definition: Human-readable meaning ("request to be delivered")
        aliases: Morphological and derivational variants from the corpus
        roles: Argument roles, labels pairwise distinct
        examples: Annotated sentences
        lexlinks: Cross-resource identifiers
    """

    sense_id: str
    lemma: str
    definition: str
    aliases: tuple[str, ...] = ()
    roles: tuple[Role, ...] = ()
    examples: tuple[FrameExample, ...] = ()
    lexlinks: tuple[LexLink, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.sense_id or self.sense_id.count(".") != 1:
            raise ValueError(f"Invalid sense_id: {self.sense_id!r}")
        prefix, suffix = self.sense_id.split(".")
        if not prefix or not suffix:
            raise ValueError(f"Invalid sense_id: {self.sense_id!r}")
        if not self.definition.strip():
            raise ValueError(f"Roleset {self.sense_id} has an empty definition")
        labels = [role.label for role in self.roles]
        if len(labels) != len(set(labels)):
            raise ValueError(f"Roleset {self.sense_id} has duplicate role labels: {labels}")

    def role(self, label: str) -> Role | None:
        """Get a role by label."""
        for role in self.roles:
            if role.label == label:
                return role
        return None

    def without_examples(self) -> Roleset:
        """Return a copy with the examples list emptied."""
        return replace(self, examples=())

    def to_summary_dict(self) -> dict[str, Any]:
        """Summary shape used by lemma search: sense_id, definition and roles."""
        return {
            "sense_id": self.sense_id,
            "definition": self.definition,
            "roles": [role.to_dict() for role in self.roles],
        }

    def to_dict(self) -> dict[str, Any]:
        """Complete frame definition."""
        return {
            "sense_id": self.sense_id,
            "lemma": self.lemma,
            "definition": self.definition,
            "aliases": list(self.aliases),
            "roles": [role.to_dict() for role in self.roles],
            "examples": [example.to_dict() for example in self.examples],
            "lexlinks": [link.to_dict() for link in self.lexlinks],
        }
