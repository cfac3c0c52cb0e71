# this_file: schemaroles/pipeline/grounding.py
"""Heuristic grounding of roleset arguments to table columns."""

from __future__ import annotations

import re

from loguru import logger

from schemaroles.ddl.model import Column, TableContext
from schemaroles.frames.model import Roleset, role_sort_key
from schemaroles.utils.text import name_tokens, singularize

AGENT_TOKENS = frozenset({"user", "person", "customer", "account"})
LOCATION_TOKENS = frozenset({"location", "place", "region", "city", "address", "country"})
TEMPORAL_TYPES = ("TIMESTAMP", "DATETIME", "DATE", "TIME")
TEMPORAL_TOKENS = frozenset({"date", "time", "timestamp"})

DEFAULT_DESCRIPTIONS = {
    "ARG0": "agent, causer, or experiencer",
    "ARG1": "patient, theme, or entity affected",
}

_STOPWORDS = frozenset(
    {"a", "an", "and", "by", "for", "from", "in", "of", "on", "or", "the", "thing", "to", "with"}
)
_WORD = re.compile(r"[a-z]+")


def is_temporal(column: Column) -> bool:
    """Timestamp-like by declared type, or by a date/time name token."""
    declared = column.declared_type.upper()
    if any(marker in declared for marker in TEMPORAL_TYPES):
        return True
    return bool(TEMPORAL_TOKENS & set(name_tokens(column.name)))


def _description_tokens(description: str) -> set[str]:
    return {
        singularize(word)
        for word in _WORD.findall(description.lower())
        if word not in _STOPWORDS and len(word) > 1
    }


class _ColumnPool:
    """Columns of one table, each handed out at most once."""

    def __init__(self, ctx: TableContext):
        self.ctx = ctx
        self.used: set[str] = set()
        self.primary_key = [ctx.table.declared_name(name) for name in ctx.table.primary_key]
        self.fk_targets: dict[str, str] = {}
        for fk in ctx.outbound_refs:
            for name in fk.local_columns:
                self.fk_targets.setdefault(ctx.table.declared_name(name), fk.referenced_table)

    def take(self, name: str) -> str:
        self.used.add(name)
        return name

    def free(self, name: str) -> bool:
        return name not in self.used

    def fk_columns(
        self, target_tokens: frozenset[str] | None = None, exclude: frozenset[str] = frozenset()
    ) -> list[str]:
        """Unused FK columns, optionally filtered by tokens of the referenced table name."""
        columns: list[str] = []
        for column, target in self.fk_targets.items():
            if not self.free(column):
                continue
            tokens = set(name_tokens(target))
            if target_tokens is not None and not tokens & target_tokens:
                continue
            if tokens & exclude:
                continue
            columns.append(column)
        return columns

    def plain_columns(self) -> list[Column]:
        """Unused columns that are neither primary nor foreign key columns."""
        return [
            column
            for column in self.ctx.table.columns
            if self.free(column.name)
            and column.name not in self.primary_key
            and column.name not in self.fk_targets
        ]


def _agent_column(pool: _ColumnPool) -> str | None:
    for candidates in (
        pool.fk_columns(AGENT_TOKENS),
        pool.fk_columns(exclude=LOCATION_TOKENS),
        pool.fk_columns(),
        [name for name in pool.primary_key if pool.free(name)],
    ):
        if candidates:
            return pool.take(candidates[0])
    return None


def _theme_column(pool: _ColumnPool) -> str | None:
    fk_candidates = pool.fk_columns(exclude=AGENT_TOKENS | LOCATION_TOKENS) or pool.fk_columns(
        exclude=AGENT_TOKENS
    )
    if fk_candidates:
        return pool.take(fk_candidates[0])
    plain = pool.plain_columns()
    non_temporal = [column for column in plain if not is_temporal(column)]
    for candidates in (non_temporal, plain):
        if candidates:
            return pool.take(candidates[0].name)
    return None


def _temporal_column(pool: _ColumnPool) -> str | None:
    for column in pool.ctx.table.columns:
        if pool.free(column.name) and is_temporal(column):
            return pool.take(column.name)
    return None


def _location_column(pool: _ColumnPool) -> str | None:
    fk_candidates = pool.fk_columns(LOCATION_TOKENS)
    if fk_candidates:
        return pool.take(fk_candidates[0])
    for column in pool.ctx.table.columns:
        if pool.free(column.name) and set(name_tokens(column.name)) & LOCATION_TOKENS:
            return pool.take(column.name)
    return None


def _overlap_column(pool: _ColumnPool, description: str) -> str | None:
    wanted = _description_tokens(description)
    if not wanted:
        return None
    for column in pool.ctx.table.columns:
        if pool.free(column.name) and wanted & set(name_tokens(column.name)):
            return pool.take(column.name)
    return None


def ground_arguments(roleset: Roleset, ctx: TableContext) -> dict[str, str]:
    """Assign table columns to the arguments of a roleset.

    ARG0 takes an FK to an agent-like table (user, person, customer, account),
    else an FK column, else the primary key. ARG1 takes an FK to a non-agent
    table, else the first non-key column. ARGM-TMP (timestamp-like column)
    and ARGM-LOC (FK to or name of a place) are added whenever such a column
    exists. Remaining roles take a column sharing a word with the role
    description. A column is used at most once; a role left without a column
    gets its description as value.

    Args:
        roleset: Roleset to ground
        ctx: Table context

    Returns:
        Role label -> column name or description, ARG0 and ARG1 always present
    """
    pool = _ColumnPool(ctx)
    descriptions = {role.label: role.description for role in roleset.roles}
    grounded: dict[str, str] = {}

    for label, finder in (("ARG0", _agent_column), ("ARG1", _theme_column)):
        column = finder(pool)
        grounded[label] = column or descriptions.get(label) or DEFAULT_DESCRIPTIONS[label]

    for label, finder in (("ARGM-TMP", _temporal_column), ("ARGM-LOC", _location_column)):
        column = finder(pool)
        if column is not None:
            grounded[label] = column
        elif label in descriptions:
            grounded[label] = descriptions[label] or label

    for role in roleset.roles:
        if role.label in grounded:
            continue
        column = _overlap_column(pool, role.description)
        grounded[role.label] = column or role.description or role.label

    result = dict(sorted(grounded.items(), key=lambda item: role_sort_key(item[0])))
    logger.debug(f"Grounded {roleset.sense_id} on {ctx.table.name}: {result}")
    return result
