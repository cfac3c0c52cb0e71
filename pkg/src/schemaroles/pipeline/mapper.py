# this_file: schemaroles/pipeline/mapper.py
"""Table mapper: verbs -> rolesets -> grounding -> confidence -> mapping file."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path

from loguru import logger

from schemaroles.ddl.model import TableContext
from schemaroles.frames.index import DEFAULT_MAX_RESULTS, FrameIndex
from schemaroles.frames.model import CORE_ROLE_PATTERN, Roleset
from schemaroles.mapping.codec import serialize_mapping
from schemaroles.mapping.model import RolesetMapping, TableMappingOutput
from schemaroles.mapping.status import mapping_path
from schemaroles.pipeline.grounding import ground_arguments
from schemaroles.pipeline.providers import ProviderError, VerbProvider, sanitize_verbs
from schemaroles.utils.fileio import atomic_write_bytes
from schemaroles.utils.text import name_tokens, normalize_token

EXACT_MATCH = 1.0
EXPANSION_MATCH = 0.5


class MappingWriteError(Exception):
    """Raised when a mapping file cannot be written."""

    def __init__(self, path: Path, cause: BaseException):
        """Initialize write error.

        Args:
            path: Destination that failed
            cause: Underlying exception
        """
        self.path = path
        self.cause = cause
        super().__init__(f"Cannot write mapping file {path}: {cause}")


@dataclass(frozen=True)
class MapperConfig:
    """Selection parameters of the table mapper.

    Attributes:
        max_rolesets_per_table: Mappings kept per table
        num_verbs: Candidate verbs requested from the provider
        min_confidence: Candidates scoring below this are dropped
    """

    max_rolesets_per_table: int = 15
    num_verbs: int = 8
    min_confidence: float = 0.0

    def __post_init__(self) -> None:
        if self.max_rolesets_per_table < 1:
            raise ValueError(
                f"max_rolesets_per_table must be >= 1, got {self.max_rolesets_per_table}"
            )
        if self.num_verbs < 1:
            raise ValueError(f"num_verbs must be >= 1, got {self.num_verbs}")
        if not 0.0 <= self.min_confidence <= 1.0:
            raise ValueError(f"min_confidence must be within [0, 1], got {self.min_confidence}")


@dataclass(frozen=True)
class ConfidenceWeights:
    """Weights of the confidence formula.

    confidence = clamp01(lemma_match * w_lemma + core_fraction * w_core + fk_support * w_fk)
    """

    lemma_match: float = 0.5
    grounded_core: float = 0.3
    fk_support: float = 0.2

    def __post_init__(self) -> None:
        if min(self.lemma_match, self.grounded_core, self.fk_support) < 0:
            raise ValueError("Confidence weights must be non-negative")

    def score(self, lemma_match: float, core_fraction: float, fk_support: float) -> float:
        """Weighted sum before clamping."""
        return (
            self.lemma_match * lemma_match
            + self.grounded_core * core_fraction
            + self.fk_support * fk_support
        )

    def scaled(self, factor: float) -> ConfidenceWeights:
        """All three weights multiplied by a positive factor."""
        if factor <= 0:
            raise ValueError(f"Scale factor must be positive, got {factor}")
        return ConfidenceWeights(
            self.lemma_match * factor, self.grounded_core * factor, self.fk_support * factor
        )


DEFAULT_WEIGHTS = ConfidenceWeights()


@dataclass(frozen=True)
class ScoredCandidate:
    """A roleset considered for a table.

    Attributes:
        roleset: Candidate roleset
        grounded_roles: Role label -> column or description
        lemma_match: Raw relevance, 1.0 for a table-name token match, 0.5 for an expansion
        provenance: Verb lemma whose search produced the candidate
        confidence: Attached by estimate_confidence
    """

    roleset: Roleset
    grounded_roles: dict[str, str] = field(default_factory=dict)
    lemma_match: float = EXPANSION_MATCH
    provenance: str = ""
    confidence: float = 0.0

    @property
    def sense_id(self) -> str:
        return self.roleset.sense_id

    def to_mapping(self) -> RolesetMapping:
        return RolesetMapping(
            sense_id=self.roleset.sense_id,
            lemma=self.roleset.lemma,
            definition=self.roleset.definition,
            roles=dict(self.grounded_roles),
            confidence=self.confidence,
        )


def _table_tokens(ctx: TableContext) -> set[str]:
    tokens = name_tokens(ctx.table.name)
    return {*tokens, "_".join(tokens)}


def rank_rolesets(
    candidates: Sequence[Roleset],
    ctx: TableContext,
    provenance: Sequence[str] | None = None,
) -> list[ScoredCandidate]:
    """Pair candidates with grounded roles and a raw relevance score.

    A candidate scores 1.0 when its lemma, one of its aliases or the verb that
    found it is a token of the table name, 0.5 otherwise. Candidates sharing a
    sense_id collapse into the best-scoring one (first seen on ties).

    Args:
        candidates: Rolesets from lemma searches, in search order
        ctx: Table context
        provenance: Verb lemma that produced each candidate (default: its own lemma)

    Returns:
        Scored candidates in first-seen order, confidence not yet attached
    """
    if provenance is not None and len(provenance) != len(candidates):
        raise ValueError("provenance must have one entry per candidate")

    table_tokens = _table_tokens(ctx)
    best: dict[str, ScoredCandidate] = {}
    for position, roleset in enumerate(candidates):
        source = provenance[position] if provenance is not None else roleset.lemma
        words = {roleset.lemma, *roleset.aliases, normalize_token(source)}
        lemma_match = EXACT_MATCH if words & table_tokens else EXPANSION_MATCH

        current = best.get(roleset.sense_id)
        if current is not None and current.lemma_match >= lemma_match:
            continue
        best[roleset.sense_id] = ScoredCandidate(
            roleset=roleset,
            grounded_roles=ground_arguments(roleset, ctx),
            lemma_match=lemma_match,
            provenance=source,
        )
    return list(best.values())


def confidence_components(
    candidate: ScoredCandidate, ctx: TableContext
) -> tuple[float, float, float]:
    """(lemma_match, grounded core fraction, FK support) of a candidate."""
    columns = {name.lower() for name in ctx.table.column_names}
    core = [label for label in candidate.grounded_roles if CORE_ROLE_PATTERN.fullmatch(label)]
    grounded_core = [label for label in core if candidate.grounded_roles[label].lower() in columns]
    core_fraction = len(grounded_core) / len(core) if core else 0.0

    fk_columns = {name.lower() for name in ctx.foreign_key_columns()}
    grounded_values = candidate.grounded_roles.values()
    fk_support = 1.0 if any(value.lower() in fk_columns for value in grounded_values) else 0.0
    return candidate.lemma_match, core_fraction, fk_support


def estimate_confidence(
    candidate: ScoredCandidate,
    ctx: TableContext,
    weights: ConfidenceWeights = DEFAULT_WEIGHTS,
) -> float:
    """Confidence of a candidate in [0, 1].

    Args:
        candidate: Ranked candidate with grounded roles
        ctx: Table context the roles were grounded on
        weights: Formula weights

    Returns:
        clamp01 of the weighted lemma match, core-role grounding and FK support
    """
    score = weights.score(*confidence_components(candidate, ctx))
    return min(1.0, max(0.0, score))


def select_mappings(
    candidates: Sequence[ScoredCandidate], cfg: MapperConfig
) -> list[ScoredCandidate]:
    """Filter by min_confidence, order by confidence then sense_id, keep the top k."""
    kept = [candidate for candidate in candidates if candidate.confidence >= cfg.min_confidence]
    kept.sort(key=lambda candidate: (-candidate.confidence, candidate.sense_id))
    return kept[: cfg.max_rolesets_per_table]


def build_table_mapping(
    ctx: TableContext,
    index: FrameIndex,
    verbs: VerbProvider,
    cfg: MapperConfig,
    weights: ConfidenceWeights = DEFAULT_WEIGHTS,
) -> TableMappingOutput:
    """Run the mapping steps for one table without touching the filesystem.

    Raises:
        ProviderError: If the verb provider fails
    """
    try:
        raw_verbs = verbs.get_verbs(ctx, cfg.num_verbs)
    except ProviderError:
        raise
    except Exception as e:
        raise ProviderError(
            f"Verb provider {verbs.get_name()} failed on {ctx.table.name}: {e}"
        ) from e
    lemmas = sanitize_verbs(raw_verbs, cfg.num_verbs)
    if lemmas != list(raw_verbs):
        logger.warning(f"Provider output for {ctx.table.name} sanitized: {raw_verbs!r} -> {lemmas}")

    found: list[Roleset] = []
    sources: list[str] = []
    for lemma in lemmas:
        for roleset in index.search_by_lemma(lemma, DEFAULT_MAX_RESULTS):
            found.append(roleset)
            sources.append(lemma)

    ranked = rank_rolesets(found, ctx, sources)
    scored = [
        replace(candidate, confidence=estimate_confidence(candidate, ctx, weights))
        for candidate in ranked
    ]
    selected = select_mappings(scored, cfg)
    return TableMappingOutput(
        table_name=ctx.table.name,
        mappings=tuple(candidate.to_mapping() for candidate in selected),
    )


def map_table(
    ctx: TableContext,
    index: FrameIndex,
    verbs: VerbProvider,
    cfg: MapperConfig,
    output_dir: Path | str,
    db_name: str,
    weights: ConfidenceWeights = DEFAULT_WEIGHTS,
) -> TableMappingOutput:
    """Map one table and persist the result atomically.

    The file ``output_dir/db_name/<table>.json`` is written once, after every
    step succeeded.

    Args:
        ctx: Table context from the parsed schema
        index: Loaded frame index
        verbs: Candidate verb provider
        cfg: Selection parameters
        output_dir: Output folder root
        db_name: Database name
        weights: Confidence formula weights

    Returns:
        The record that was written

    Raises:
        ProviderError: If the verb provider fails
        MappingWriteError: If the file cannot be written
    """
    output = build_table_mapping(ctx, index, verbs, cfg, weights)
    data = serialize_mapping(output)
    path = mapping_path(output_dir, db_name, ctx.table.name)
    try:
        atomic_write_bytes(path, data)
    except OSError as e:
        raise MappingWriteError(path, e) from e

    logger.bind(
        event="mapper.table",
        table=ctx.table.name,
        mappings=len(output.mappings),
        path=str(path),
    ).info(f"Mapped {ctx.table.name}: {len(output.mappings)} rolesets -> {path}")
    return output
