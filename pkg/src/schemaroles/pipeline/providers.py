# this_file: schemaroles/pipeline/providers.py
"""Verb providers: the candidate-verb step of table mapping.

A provider turns a table context into an ordered list of PropBank lemmas.
The shipped baseline is deterministic and offline; other implementations
(for example one backed by a language model) plug in through the registry
or a ``package.module:Factory`` path.
"""

from __future__ import annotations

import importlib
import json
from abc import ABC, abstractmethod
from collections.abc import Mapping, Sequence
from functools import lru_cache
from importlib import resources
from typing import Any

from loguru import logger

from schemaroles.ddl.model import TableContext
from schemaroles.frames.index import FrameIndex
from schemaroles.utils.text import normalize_token, singularize, split_identifier


MIN_TOKEN_LENGTH = 2


class ProviderError(Exception):
    """Raised when a provider cannot be created or fails to answer."""


@lru_cache(maxsize=1)
def load_lexicon() -> dict[str, tuple[str, ...]]:
    """Load the shipped table-domain lexicon (singular token -> lemmas)."""
    source = resources.files("schemaroles").joinpath("data", "table_lexicon.json")
    document = json.loads(source.read_text(encoding="utf-8"))
    entries = {key: tuple(values) for key, values in document["entries"].items()}
    logger.debug(f"Loaded table lexicon with {len(entries)} entries")
    return entries


def sanitize_verbs(raw: Sequence[Any], num_verbs: int) -> list[str]:
    """Bring provider output in line with the contract.

    Normalizes every entry, drops non-strings, blanks and repeats, and
    truncates to num_verbs.
    """
    verbs: list[str] = []
    for item in raw:
        if not isinstance(item, str):
            continue
        verb = normalize_token(item)
        if verb and verb not in verbs:
            verbs.append(verb)
    return verbs[:num_verbs]


class VerbProvider(ABC):
    """Abstract base class for candidate-verb providers.

    Implementations must return lowercase, non-empty, pairwise distinct
    lemmas, at most num_verbs of them, and be safe to call from several
    threads at once.
    """

    def __init__(self, config: dict[str, Any] | None = None):
        """Initialize provider with optional configuration.

        Args:
            config: Provider-specific configuration options
        """
        self.config = config or {}
        logger.debug(f"Initialized {self.__class__.__name__} with keys {sorted(self.config)}")

    @abstractmethod
    def get_name(self) -> str:
        """Get the provider name."""

    @abstractmethod
    def get_verbs(self, ctx: TableContext, num_verbs: int) -> list[str]:
        """Propose candidate verb lemmas for a table.

        Args:
            ctx: Table with its FK neighbourhood
            num_verbs: Maximum number of lemmas

        Returns:
            Ordered lemmas, most relevant first
        """


class BaselineVerbProvider(VerbProvider):
    """Deterministic provider deriving verbs from the table name.

    Steps: split the name into tokens, singularize them, drop one-letter
    tokens, keep the tokens that are lemmas or aliases in the frame index,
    append lexicon expansions of every token, then truncate.
    """

    def __init__(self, config: dict[str, Any] | None = None):
        """Initialize baseline provider.

        Args:
            config: Provider configuration with options:
                - index: FrameIndex used to keep only known lemmas (default: keep all tokens)
                - lexicon: Mapping token -> lemmas (default: shipped lexicon)
        """
        super().__init__(config)
        self.index: FrameIndex | None = self.config.get("index")
        lexicon: Mapping[str, Sequence[str]] | None = self.config.get("lexicon")
        self.lexicon = lexicon if lexicon is not None else load_lexicon()

    def get_name(self) -> str:
        return "baseline"

    def get_verbs(self, ctx: TableContext, num_verbs: int) -> list[str]:
        if num_verbs < 1:
            raise ValueError(f"num_verbs must be >= 1, got {num_verbs}")

        tokens = [singularize(token) for token in split_identifier(ctx.table.name)]
        tokens = [token for token in tokens if token.isalpha() and len(token) >= MIN_TOKEN_LENGTH]

        verbs: list[str] = []
        for token in tokens:
            if self.index is None or token in self.index.lemma_index:
                verbs.append(token)
        for token in tokens:
            verbs.extend(self.lexicon.get(token, ()))

        result = sanitize_verbs(verbs, num_verbs)
        logger.debug(f"Baseline verbs for {ctx.table.name}: {result}")
        return result


class StaticVerbProvider(VerbProvider):
    """Provider answering from a fixed table -> verbs mapping."""

    def __init__(self, config: dict[str, Any] | None = None):
        """Initialize static provider.

        Args:
            config: Provider configuration with options:
                - verbs: Mapping table name -> lemmas (matched case-insensitively)
                - default: Lemmas for tables not listed (default: none)
        """
        super().__init__(config)
        self.verbs = {
            name.lower(): list(lemmas) for name, lemmas in self.config.get("verbs", {}).items()
        }
        self.default = list(self.config.get("default", []))

    def get_name(self) -> str:
        return "static"

    def get_verbs(self, ctx: TableContext, num_verbs: int) -> list[str]:
        lemmas = self.verbs.get(ctx.table.name.lower(), self.default)
        return sanitize_verbs(lemmas, num_verbs)


class ProviderRegistry:
    """Registry for available verb provider implementations."""

    _providers: dict[str, type[VerbProvider]] = {}

    @classmethod
    def register(cls, name: str, provider_class: type[VerbProvider]) -> None:
        """Register a provider implementation.

        Args:
            name: Name to register the provider under
            provider_class: Provider class to register
        """
        if not issubclass(provider_class, VerbProvider):
            raise TypeError(f"{provider_class} must be a subclass of VerbProvider")
        cls._providers[name] = provider_class
        logger.debug(f"Registered verb provider: {name} -> {provider_class.__name__}")

    @classmethod
    def get(cls, name: str) -> type[VerbProvider]:
        """Get a registered provider class.

        Raises:
            KeyError: If provider name is not registered
        """
        if name not in cls._providers:
            raise KeyError(
                f"Verb provider '{name}' not registered. Available: {list(cls._providers.keys())}"
            )
        return cls._providers[name]

    @classmethod
    def create(cls, name: str, config: dict[str, Any] | None = None) -> VerbProvider:
        """Create a provider from a registered name or a ``package.module:Factory`` path.

        Args:
            name: Registered name ("baseline", "static") or dotted path
            config: Provider configuration

        Returns:
            Provider instance

        Raises:
            ProviderError: If the provider cannot be found or created
        """
        if ":" in name:
            return load_provider(name, config)
        try:
            provider_class = cls.get(name)
        except KeyError as e:
            raise ProviderError(str(e.args[0])) from e
        try:
            return provider_class(config)
        except Exception as e:
            raise ProviderError(f"Cannot create verb provider {name!r}: {e}") from e

    @classmethod
    def list_providers(cls) -> list[str]:
        return list(cls._providers.keys())


def load_provider(path: str, config: dict[str, Any] | None = None) -> VerbProvider:
    """Import a provider from ``package.module:Factory``.

    The factory is either a VerbProvider subclass or a callable taking the
    config dict and returning a VerbProvider.

    Raises:
        ProviderError: If the import fails or the factory yields no VerbProvider
    """
    module_name, _, attribute = path.partition(":")
    if not module_name or not attribute:
        raise ProviderError(f"Provider path must look like 'package.module:Factory', got {path!r}")
    try:
        factory = getattr(importlib.import_module(module_name), attribute)
    except (ImportError, AttributeError) as e:
        raise ProviderError(f"Cannot load provider {path!r}: {e}") from e

    try:
        provider = factory(config)
    except Exception as e:
        raise ProviderError(f"Provider factory {path!r} failed: {e}") from e
    if not isinstance(provider, VerbProvider):
        raise ProviderError(
            f"Provider factory {path!r} returned {type(provider).__name__}, not a VerbProvider"
        )
    logger.info(f"Loaded verb provider {provider.get_name()} from {path}")
    return provider


def baseline_verbs(
    ctx: TableContext,
    num_verbs: int,
    index: FrameIndex | None = None,
    lexicon: Mapping[str, Sequence[str]] | None = None,
) -> list[str]:
    """Candidate verbs of the deterministic baseline.

    Args:
        ctx: Table context
        num_verbs: Maximum number of lemmas (>= 1)
        index: Frame index for filtering name tokens
        lexicon: Table-domain lexicon (default: shipped lexicon)

    Returns:
        Ordered, distinct lemmas; empty when nothing in the name is usable
    """
    config: dict[str, Any] = {"index": index}
    if lexicon is not None:
        config["lexicon"] = lexicon
    return BaselineVerbProvider(config).get_verbs(ctx, num_verbs)


ProviderRegistry.register("baseline", BaselineVerbProvider)
ProviderRegistry.register("static", StaticVerbProvider)
