# this_file: schemaroles/utils/text.py
"""Identifier and lemma text utilities for schemaroles."""

from __future__ import annotations

import re
import unicodedata

from loguru import logger

# Acronym runs ("HTTPRequest" -> "HTTP", "Request"), capitalized words, lowercase runs, digit runs
_IDENTIFIER_TOKEN = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+")

_IRREGULAR_PLURALS = {
    "people": "person",
    "children": "child",
    "men": "man",
    "women": "woman",
    "feet": "foot",
    "mice": "mouse",
    "indices": "index",
    "matrices": "matrix",
    "criteria": "criterion",
}

# Words ending in "s" that are already singular
_SINGULAR_S_ENDINGS = ("ss", "us", "is", "ous")


def normalize_token(text: str) -> str:
    """Normalize a lemma, alias or query string for index lookups.

    Lowercases, trims and joins internal whitespace with underscores, so
    multi-word lemmas ("take off") and their corpus spelling ("take_off")
    share one key. No stemming is applied.

    Args:
        text: Raw lemma or alias text

    Returns:
        Normalized, whitespace-free key (may be empty)
    """
    return "_".join(text.strip().lower().split())


def split_identifier(name: str) -> list[str]:
    """Split a table or column identifier into lowercase word tokens.

    Splits on case boundaries, digits, underscores and any other
    non-alphanumeric separator.

    Args:
        name: Identifier such as "PhoneRequests" or "order_items2"

    Returns:
        Lowercase tokens, e.g. ["phone", "requests"]
    """
    if not name:
        return []

    text = unicodedata.normalize("NFKD", name)
    text = text.encode("ascii", "ignore").decode("ascii")

    tokens = [match.group(0).lower() for match in _IDENTIFIER_TOKEN.finditer(text)]
    logger.debug(f"Split identifier '{name}' into {tokens}")
    return tokens


def singularize(word: str) -> str:
    """Reduce a plural English noun to its singular form.

    Rule-based and deliberately small: irregular table nouns, "-ies",
    sibilant "-es" endings and a trailing "s".

    Args:
        word: Lowercase word

    Returns:
        Singular form (the word itself when no rule applies)
    """
    if word in _IRREGULAR_PLURALS:
        return _IRREGULAR_PLURALS[word]
    if len(word) <= 2 or not word.isalpha():
        return word
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith(("sses", "xes", "zes", "ches", "shes")):
        return word[:-2]
    if word.endswith("s") and not word.endswith(_SINGULAR_S_ENDINGS):
        return word[:-1]
    return word


def name_tokens(name: str) -> list[str]:
    """Split an identifier and singularize every token, keeping order and dropping repeats.

    Args:
        name: Table or column identifier

    Returns:
        Singular lowercase tokens
    """
    tokens: list[str] = []
    for token in split_identifier(name):
        singular = singularize(token)
        if singular not in tokens:
            tokens.append(singular)
    return tokens
