# this_file: schemaroles/frames/loader.py
"""PropBank frame-file parser and corpus loader."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from loguru import logger

from schemaroles.frames.index import FrameIndex
from schemaroles.frames.model import FrameExample, LexLink, Role, Roleset, is_valid_role_label
from schemaroles.utils.text import normalize_token


class FrameLoadError(Exception):
    """Raised when a frame corpus cannot be loaded at all."""

    def __init__(self, message: str, corpus_dir: Path | None = None):
        """Initialize load error.

        Args:
            message: Error description
            corpus_dir: The directory that failed to load
        """
        self.corpus_dir = corpus_dir
        if corpus_dir is not None:
            super().__init__(f"{message}: {corpus_dir}")
        else:
            super().__init__(message)


@dataclass(frozen=True)
class FrameLoadReport:
    """Outcome of a corpus load.

    Attributes:
        corpus_dir: Directory the frame files were read from
        files_total: Number of frame files found
        files_parsed: Number of files parsed successfully
        failed_files: Names of files that failed to parse
        roleset_count: Number of rolesets indexed
    """

    corpus_dir: str
    files_total: int
    files_parsed: int
    failed_files: tuple[str, ...]
    roleset_count: int

    @property
    def failed_count(self) -> int:
        return len(self.failed_files)

    def to_dict(self) -> dict[str, Any]:
        return {
            "corpus_dir": self.corpus_dir,
            "files_total": self.files_total,
            "files_parsed": self.files_parsed,
            "failed_count": self.failed_count,
            "failed_files": list(self.failed_files),
            "roleset_count": self.roleset_count,
        }


def _element_text(element: ET.Element | None) -> str:
    if element is None:
        return ""
    return " ".join("".join(element.itertext()).split())


def _role_label(number: str, function: str) -> str:
    """Build a role label from a frame file's n/f attributes.

    Numbered roles ignore their function tag ("0", "PAG" -> "ARG0");
    modifiers take it as suffix ("m", "loc" -> "ARGM-LOC").
    """
    number = number.strip()
    if number.isdigit():
        return f"ARG{number}"
    if number.upper() == "A":
        return "ARGA"
    if number.upper() == "M":
        return f"ARGM-{function.strip().upper()}"
    return f"ARG{number.upper()}"


class FrameFileParser:
    """Parser for PropBank frame XML files.

    Understands the v3.x layout (``<aliases>``, ``<lexlinks>``, examples with a
    ``<propbank>`` block of ``<arg type=...>`` spans) and the older layout
    (``vncls``/``framnet`` roleset attributes, inline ``<arg n= f=>`` spans).
    Rolesets that violate the data model are skipped with a warning.
    """

    def __init__(self, config: dict[str, Any] | None = None):
        """Initialize parser with optional configuration.

        Args:
            config: Parser configuration with options:
                - include_examples: Keep annotated examples (default: True)
        """
        self.config = config or {}
        self.include_examples = self.config.get("include_examples", True)
        logger.debug(f"Initialized {self.__class__.__name__} with config: {self.config}")

    def parse_file(self, path: Path) -> list[Roleset]:
        """Parse one frame file.

        Args:
            path: Path to the XML file

        Returns:
            Rolesets defined in the file, in document order

        Raises:
            ET.ParseError: If the file is not well-formed XML
            OSError: If the file cannot be read
        """
        root = ET.parse(path).getroot()
        rolesets: list[Roleset] = []
        for predicate in root.iter("predicate"):
            predicate_lemma = normalize_token(predicate.get("lemma", ""))
            for element in predicate.findall("roleset"):
                roleset = self._parse_roleset(element, predicate_lemma, path.name)
                if roleset is not None:
                    rolesets.append(roleset)
        logger.debug(f"Parsed {len(rolesets)} rolesets from {path.name}")
        return rolesets

    def _parse_roleset(
        self, element: ET.Element, predicate_lemma: str, filename: str
    ) -> Roleset | None:
        sense_id = normalize_token(element.get("id", ""))
        definition = " ".join(element.get("name", "").split())
        lemma = sense_id.split(".", 1)[0]

        try:
            return Roleset(
                sense_id=sense_id,
                lemma=lemma,
                definition=definition,
                aliases=self._parse_aliases(element, lemma, predicate_lemma),
                roles=self._parse_roles(element, sense_id),
                examples=self._parse_examples(element) if self.include_examples else (),
                lexlinks=self._parse_lexlinks(element),
            )
        except ValueError as e:
            logger.warning(f"Skipping roleset {sense_id or '<no id>'} in {filename}: {e}")
            return None

    def _parse_aliases(
        self, element: ET.Element, lemma: str, predicate_lemma: str
    ) -> tuple[str, ...]:
        aliases: list[str] = []
        candidates = [alias.text or "" for alias in element.iterfind("aliases/alias")]
        # The enclosing predicate lemma can differ from the id prefix (e.g. "take_off" in take.xml)
        candidates.append(predicate_lemma)
        for candidate in candidates:
            alias = normalize_token(candidate)
            if alias and alias != lemma and alias not in aliases:
                aliases.append(alias)
        return tuple(aliases)

    def _parse_roles(self, element: ET.Element, sense_id: str) -> tuple[Role, ...]:
        roles: list[Role] = []
        seen: set[str] = set()
        for role_element in element.iterfind("roles/role"):
            label = _role_label(role_element.get("n", ""), role_element.get("f", ""))
            if not is_valid_role_label(label):
                logger.warning(f"Skipping invalid role label {label!r} in {sense_id}")
                continue
            if label in seen:
                logger.warning(f"Skipping duplicate role {label} in {sense_id}")
                continue
            seen.add(label)
            description = " ".join(role_element.get("descr", "").split())
            roles.append(Role(label=label, description=description))
        return tuple(roles)

    def _parse_examples(self, element: ET.Element) -> tuple[FrameExample, ...]:
        examples: list[FrameExample] = []
        for example in element.findall("example"):
            text = _element_text(example.find("text"))
            if not text:
                continue

            spans: list[tuple[str, str]] = []
            annotation = example.find("propbank")
            if annotation is not None:
                for arg in annotation.findall("arg"):
                    spans.append((arg.get("type", "").strip(), _element_text(arg)))
            else:
                for arg in example.findall("arg"):
                    label = _role_label(arg.get("n", ""), arg.get("f", ""))
                    spans.append((label, _element_text(arg)))

            examples.append(
                FrameExample(text=text, name=example.get("name", ""), argument_spans=tuple(spans))
            )
        return tuple(examples)

    def _parse_lexlinks(self, element: ET.Element) -> tuple[LexLink, ...]:
        links: list[LexLink] = []
        for link in element.iterfind("lexlinks/lexlink"):
            resource = link.get("resource", "").strip()
            identifier = link.get("class", "").strip()
            if resource and identifier:
                links.append(LexLink(resource=resource, identifier=identifier))

        # Pre-3.x frame files carry the links as roleset attributes
        for attribute, resource in (("vncls", "VerbNet"), ("framnet", "FrameNet")):
            for identifier in element.get(attribute, "").split():
                if identifier != "-":
                    links.append(LexLink(resource=resource, identifier=identifier))

        unique: list[LexLink] = []
        for link in links:
            if link not in unique:
                unique.append(link)
        return tuple(unique)


def _frame_files(corpus_dir: Path) -> list[Path]:
    files = sorted(corpus_dir.glob("*.xml"))
    nested = corpus_dir / "frames"
    # Accept the root of a propbank-frames checkout as well as its frames/ directory
    if not files and nested.is_dir():
        files = sorted(nested.glob("*.xml"))
    return files


def load_frame_corpus(corpus_dir: Path | str, include_examples: bool = True) -> FrameIndex:
    """Parse a PropBank frame corpus into an immutable index.

    Files that fail to parse are listed in the load report and skipped.

    Args:
        corpus_dir: Directory of frame XML files (or a propbank-frames checkout)
        include_examples: Keep annotated examples in memory

    Returns:
        Fully populated FrameIndex with its load report attached

    Raises:
        FrameLoadError: If the directory is missing or unreadable, or no file parses
    """
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise FrameLoadError("Frame corpus directory not found", corpus_dir)

    try:
        files = _frame_files(corpus_dir)
    except OSError as e:
        raise FrameLoadError(f"Frame corpus directory unreadable ({e})", corpus_dir) from e

    parser = FrameFileParser({"include_examples": include_examples})
    rolesets: list[Roleset] = []
    failed: list[str] = []
    for path in files:
        try:
            rolesets.extend(parser.parse_file(path))
        except (ET.ParseError, OSError) as e:
            logger.warning(f"Failed to parse frame file {path.name}: {e}")
            failed.append(path.name)

    parsed = len(files) - len(failed)
    if parsed == 0:
        raise FrameLoadError("No frame files could be parsed", corpus_dir)

    index = FrameIndex.build(rolesets)
    report = FrameLoadReport(
        corpus_dir=str(corpus_dir),
        files_total=len(files),
        files_parsed=parsed,
        failed_files=tuple(failed),
        roleset_count=len(index),
    )
    logger.bind(event="frames.load", **report.to_dict()).info(
        f"Loaded {report.roleset_count} rolesets from {parsed}/{len(files)} frame files"
    )
    return index.with_report(report)
