# this_file: schemaroles/frames/index.py
"""Immutable roleset index with lemma/alias lookups."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import TYPE_CHECKING

from loguru import logger

from schemaroles.frames.model import Roleset
from schemaroles.utils.text import normalize_token

if TYPE_CHECKING:
    from schemaroles.frames.loader import FrameLoadReport

DEFAULT_MAX_RESULTS = 10


class FrameNotFoundError(KeyError):
    """Raised when a sense_id is not present in the index."""

    def __init__(self, sense_id: str):
        """Initialize not-found error.

        Args:
            sense_id: The identifier that was queried
        """
        self.sense_id = sense_id
        super().__init__(sense_id)

    def __str__(self) -> str:
        return f"Roleset not found: {self.sense_id}"


@dataclass(frozen=True)
class FrameIndex:
    """Immutable corpus of rolesets with an inverted lemma/alias index.

    Safe to share between threads: nothing mutates after build().

    Attributes:
        rolesets: sense_id -> Roleset
        lemma_index: normalized token -> sense_ids reachable from it
        report: Load report, when the index came from load_frame_corpus
    """

    rolesets: Mapping[str, Roleset]
    lemma_index: Mapping[str, frozenset[str]]
    report: FrameLoadReport | None = field(default=None, compare=False)

    @classmethod
    def build(cls, rolesets: Iterable[Roleset]) -> FrameIndex:
        """Build an index from rolesets.

        The first roleset seen for a sense_id wins; later duplicates are
        logged and dropped.

        Args:
            rolesets: Rolesets in corpus order

        Returns:
            The populated index
        """
        by_id: dict[str, Roleset] = {}
        for roleset in rolesets:
            if roleset.sense_id in by_id:
                logger.warning(f"Duplicate roleset {roleset.sense_id} ignored")
                continue
            by_id[roleset.sense_id] = roleset

        postings: dict[str, set[str]] = {}
        for sense_id, roleset in by_id.items():
            for token in (roleset.lemma, *roleset.aliases):
                key = normalize_token(token)
                if key:
                    postings.setdefault(key, set()).add(sense_id)

        logger.debug(f"Built frame index: {len(by_id)} rolesets, {len(postings)} lemma keys")
        return cls(
            rolesets=MappingProxyType(dict(sorted(by_id.items()))),
            lemma_index=MappingProxyType(
                {key: frozenset(ids) for key, ids in sorted(postings.items())}
            ),
        )

    def with_report(self, report: FrameLoadReport) -> FrameIndex:
        """Attach a load report."""
        return replace(self, report=report)

    def __len__(self) -> int:
        return len(self.rolesets)

    def __contains__(self, sense_id: object) -> bool:
        return isinstance(sense_id, str) and normalize_token(sense_id) in self.rolesets

    def __iter__(self) -> Iterator[Roleset]:
        return iter(self.rolesets.values())

    def lemmas(self) -> list[str]:
        """All indexed lemma and alias keys, sorted."""
        return list(self.lemma_index)

    def search_by_lemma(
        self, lemma: str, max_results: int | None = DEFAULT_MAX_RESULTS
    ) -> list[Roleset]:
        """Find rolesets whose lemma or an alias equals the normalized query.

        Args:
            lemma: Base form or morphological variant
            max_results: Result cap (None for no cap)

        Returns:
            Roleset summaries (examples removed), sense_id ascending

        Raises:
            ValueError: If max_results is below 1
        """
        if max_results is not None and max_results < 1:
            raise ValueError(f"max_results must be >= 1, got {max_results}")

        sense_ids = sorted(self.lemma_index.get(normalize_token(lemma), frozenset()))
        if max_results is not None:
            sense_ids = sense_ids[:max_results]
        logger.debug(f"search_by_lemma({lemma!r}) -> {sense_ids}")
        return [self.rolesets[sense_id].without_examples() for sense_id in sense_ids]

    def search_by_sense_id(self, sense_id: str, include_examples: bool = True) -> Roleset:
        """Retrieve a complete roleset.

        Args:
            sense_id: Identifier such as "order.02"
            include_examples: Keep the annotated examples

        Returns:
            The roleset; roles and lexlinks are always included

        Raises:
            FrameNotFoundError: If the identifier is unknown
        """
        roleset = self.rolesets.get(normalize_token(sense_id))
        if roleset is None:
            raise FrameNotFoundError(sense_id)
        return roleset if include_examples else roleset.without_examples()


def search_by_lemma(
    index: FrameIndex, lemma: str, max_results: int | None = DEFAULT_MAX_RESULTS
) -> list[Roleset]:
    """Module-level form of FrameIndex.search_by_lemma."""
    return index.search_by_lemma(lemma, max_results)


def search_by_sense_id(index: FrameIndex, sense_id: str, include_examples: bool = True) -> Roleset:
    """Module-level form of FrameIndex.search_by_sense_id."""
    return index.search_by_sense_id(sense_id, include_examples)
