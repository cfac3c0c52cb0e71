# this_file: schemaroles/pipeline/__init__.py
"""Mapping pipeline: coordinator, verb providers, table mapper and orchestrator."""

from schemaroles.pipeline.coordinator import CoordinatorReport, coordinate
from schemaroles.pipeline.grounding import ground_arguments
from schemaroles.pipeline.mapper import (
    DEFAULT_WEIGHTS,
    ConfidenceWeights,
    MapperConfig,
    MappingWriteError,
    ScoredCandidate,
    build_table_mapping,
    estimate_confidence,
    map_table,
    rank_rolesets,
)
from schemaroles.pipeline.orchestrator import (
    Orchestrator,
    OrchestratorLockedError,
    RunReport,
    run,
)
from schemaroles.pipeline.providers import (
    BaselineVerbProvider,
    ProviderError,
    ProviderRegistry,
    StaticVerbProvider,
    VerbProvider,
    baseline_verbs,
    load_provider,
)

__all__ = [
    "DEFAULT_WEIGHTS",
    "BaselineVerbProvider",
    "ConfidenceWeights",
    "CoordinatorReport",
    "MapperConfig",
    "MappingWriteError",
    "Orchestrator",
    "OrchestratorLockedError",
    "ProviderError",
    "ProviderRegistry",
    "RunReport",
    "ScoredCandidate",
    "StaticVerbProvider",
    "VerbProvider",
    "baseline_verbs",
    "build_table_mapping",
    "coordinate",
    "estimate_confidence",
    "ground_arguments",
    "load_provider",
    "map_table",
    "rank_rolesets",
    "run",
]
