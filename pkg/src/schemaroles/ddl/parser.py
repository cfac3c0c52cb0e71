# this_file: schemaroles/ddl/parser.py
"""CREATE TABLE parser for SQLite/Postgres-flavoured DDL."""

from __future__ import annotations

import re
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

from loguru import logger

from schemaroles.ddl.model import Column, ForeignKey, Schema, Table


class DDLParseError(Exception):
    """Raised when DDL text cannot be parsed."""

    def __init__(self, message: str, offset: int | None = None, statement: str | None = None):
        """Initialize DDL parse error.

        Args:
            message: Error description
            offset: Byte offset (UTF-8) into the DDL text where the error was found
            statement: Text of the offending statement
        """
        self.offset = offset
        self.statement = statement

        full_message = message
        if offset is not None:
            full_message = f"{message} at byte {offset}"
        if statement:
            snippet = " ".join(statement.split())
            if len(snippet) > 80:
                snippet = snippet[:77] + "..."
            full_message = f"{full_message} in statement: {snippet}"

        super().__init__(full_message)


_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>--[^\n]*|/\*.*?\*/)
    | (?P<string>'(?:[^']|'')*')
    | (?P<qident>"(?:[^"]|"")*"|`(?:[^`]|``)*`|\[[^\]]*\])
    | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    | (?P<ident>[^\W\d][\w$]*)
    | (?P<punct>\S)
    """,
    re.VERBOSE | re.DOTALL,
)

# Keywords that end a column type and start a column clause
_COLUMN_CLAUSES = frozenset(
    {
        "AS",
        "AUTOINCREMENT",
        "AUTO_INCREMENT",
        "CHECK",
        "COLLATE",
        "COMMENT",
        "CONSTRAINT",
        "DEFAULT",
        "GENERATED",
        "NOT",
        "NULL",
        "PRIMARY",
        "REFERENCES",
        "UNIQUE",
    }
)

_TABLE_MODIFIERS = frozenset({"TEMP", "TEMPORARY", "GLOBAL", "LOCAL", "UNLOGGED", "VIRTUAL"})
_OPAQUE_TABLE_CLAUSES = frozenset({"UNIQUE", "CHECK", "EXCLUDE"})
_INDEX_CLAUSES = frozenset({"KEY", "INDEX", "FULLTEXT", "SPATIAL"})


@dataclass(frozen=True)
class Token:
    """A lexical token with its character span in the source text."""

    kind: str
    text: str
    start: int
    end: int

    @property
    def keyword(self) -> str:
        """Upper-cased text for bare words, empty for everything else."""
        return self.text.upper() if self.kind == "ident" else ""

    @property
    def is_name(self) -> bool:
        return self.kind in ("ident", "qident")

    @property
    def value(self) -> str:
        """Identifier value with quoting removed."""
        if self.kind != "qident":
            return self.text
        opener, body = self.text[0], self.text[1:-1]
        if opener == '"':
            return body.replace('""', '"')
        if opener == "`":
            return body.replace("``", "`")
        return body


def tokenize(text: str) -> list[Token]:
    """Split DDL text into tokens, dropping whitespace and comments.

    Raises:
        DDLParseError: On unterminated quotes or block comments
    """
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:  # pragma: no cover - the punct branch matches any non-space
            raise DDLParseError("Unexpected character", _byte_offset(text, pos))
        kind = match.lastgroup or "punct"
        value = match.group()
        if kind == "punct":
            if value in "'\"`[":
                raise DDLParseError("Unterminated quoted text", _byte_offset(text, pos))
            if value == "/" and text.startswith("/*", pos):
                raise DDLParseError("Unterminated block comment", _byte_offset(text, pos))
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, match.start(), match.end()))
        pos = match.end()
    return tokens


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _squash(text: str) -> str:
    return " ".join(text.split())


class _Cursor:
    """Forward-only reader over the tokens of one clause or statement."""

    def __init__(self, tokens: list[Token], fail: Callable[[str, Token | None], DDLParseError]):
        self.tokens = tokens
        self.pos = 0
        self._fail = fail

    def done(self) -> bool:
        return self.pos >= len(self.tokens)

    def peek(self, ahead: int = 0) -> Token | None:
        index = self.pos + ahead
        return self.tokens[index] if index < len(self.tokens) else None

    def peek_keyword(self, ahead: int = 0) -> str:
        token = self.peek(ahead)
        return token.keyword if token is not None else ""

    def advance(self) -> Token:
        token = self.peek()
        if token is None:
            last = self.tokens[-1] if self.tokens else None
            raise self._fail("Unexpected end of statement", last)
        self.pos += 1
        return token

    def accept(self, *keywords: str) -> bool:
        if self.peek_keyword() in keywords:
            self.pos += 1
            return True
        return False

    def expect(self, keyword: str) -> Token:
        token = self.peek()
        if token is None or token.keyword != keyword:
            found = token.text if token is not None else "end of statement"
            raise self._fail(f"Expected {keyword}, found {found!r}", token)
        self.pos += 1
        return token

    def expect_punct(self, symbol: str) -> Token:
        token = self.peek()
        if token is None or token.kind != "punct" or token.text != symbol:
            found = token.text if token is not None else "end of statement"
            raise self._fail(f"Expected {symbol!r}, found {found!r}", token)
        self.pos += 1
        return token

    def at_punct(self, symbol: str) -> bool:
        token = self.peek()
        return token is not None and token.kind == "punct" and token.text == symbol

    def name(self) -> str:
        token = self.peek()
        if token is None or not token.is_name:
            found = token.text if token is not None else "end of statement"
            raise self._fail(f"Expected identifier, found {found!r}", token)
        self.pos += 1
        return token.value

    def qualified_name(self) -> str:
        """Read ``[schema.]name`` and keep the last part."""
        value = self.name()
        while self.at_punct("."):
            self.pos += 1
            value = self.name()
        return value

    def take_until(self, stops: frozenset[str]) -> list[Token]:
        """Take at least one token, then stop before a depth-0 keyword in stops."""
        taken = [self.advance()]
        depth = _depth_change(taken[0])
        while not self.done():
            token = self.tokens[self.pos]
            if depth == 0 and token.keyword in stops:
                break
            depth += _depth_change(token)
            taken.append(token)
            self.pos += 1
        return taken


def _depth_change(token: Token) -> int:
    if token.kind == "punct":
        if token.text == "(":
            return 1
        if token.text == ")":
            return -1
    return 0


def _split_depth0(tokens: list[Token], separator: str) -> list[list[Token]]:
    parts: list[list[Token]] = [[]]
    depth = 0
    for token in tokens:
        if depth == 0 and token.kind == "punct" and token.text == separator:
            parts.append([])
            continue
        depth += _depth_change(token)
        parts[-1].append(token)
    return parts


@dataclass
class _TableBuilder:
    name: str
    columns: list[Column]
    primary_key: list[str]
    foreign_keys: list[ForeignKey]
    constraints: list[str]


class DDLParser:
    """Parser turning DDL text into a Schema.

    Only CREATE TABLE statements are interpreted. Everything else (CREATE INDEX,
    INSERT, PRAGMA, ...) is skipped. Column and table clauses the data model has
    no field for (CHECK, UNIQUE, COLLATE, ...) are kept as opaque constraint text.
    """

    def __init__(self, config: dict[str, Any] | None = None):
        """Initialize parser with optional configuration.

        Args:
            config: Parser configuration with options:
                - strict_foreign_keys: Reject FKs naming undefined local columns (default: True)
        """
        self.config = config or {}
        self.strict_foreign_keys = self.config.get("strict_foreign_keys", True)
        self._text = ""
        self._statement = ""
        logger.debug(f"Initialized {self.__class__.__name__} with config: {self.config}")

    def parse(self, text: str, source_name: str = "") -> Schema:
        """Parse DDL text.

        Args:
            text: DDL source
            source_name: Label recorded on the schema (usually the file name)

        Returns:
            Schema with the tables in declaration order

        Raises:
            DDLParseError: On lexical errors, unbalanced parentheses, truncated or
                invalid CREATE TABLE statements and duplicate table names
        """
        self._text = text
        tables: list[Table] = []
        seen: set[str] = set()

        for statement in self._statements(tokenize(text)):
            self._statement = text[statement[0].start : statement[-1].end]
            table = self._parse_statement(statement)
            if table is None:
                continue
            if table.name.lower() in seen:
                raise self._error(f"Duplicate table name {table.name!r}", statement[0])
            seen.add(table.name.lower())
            tables.append(table)

        logger.debug(f"Parsed {len(tables)} tables from {source_name or '<text>'}")
        return Schema(tables=tuple(tables), source_name=source_name)

    def _error(self, message: str, token: Token | None) -> DDLParseError:
        offset = _byte_offset(self._text, token.start) if token is not None else None
        return DDLParseError(message, offset, self._statement or None)

    def _statements(self, tokens: list[Token]) -> list[list[Token]]:
        statements: list[list[Token]] = []
        current: list[Token] = []
        open_parens: list[Token] = []
        for token in tokens:
            if token.kind == "punct" and token.text == ";" and not open_parens:
                if current:
                    statements.append(current)
                current = []
                continue
            if token.kind == "punct" and token.text == "(":
                open_parens.append(token)
            elif token.kind == "punct" and token.text == ")":
                if not open_parens:
                    self._statement = self._text[current[0].start : token.end] if current else ")"
                    raise self._error("Unbalanced parentheses: unexpected ')'", token)
                open_parens.pop()
            current.append(token)

        if open_parens:
            self._statement = self._text[current[0].start : current[-1].end]
            raise self._error("Unbalanced parentheses: '(' is never closed", open_parens[0])
        if current:
            statements.append(current)
        return statements

    def _parse_statement(self, tokens: list[Token]) -> Table | None:
        cursor = _Cursor(tokens, self._error)
        if not cursor.accept("CREATE"):
            return None
        if cursor.accept("OR"):
            cursor.expect("REPLACE")
        while cursor.accept(*_TABLE_MODIFIERS):
            pass
        if not cursor.accept("TABLE"):
            return None

        if cursor.done():
            raise self._error("Truncated CREATE TABLE: missing table name", tokens[-1])
        if cursor.peek_keyword() == "IF":
            cursor.advance()
            cursor.expect("NOT")
            cursor.expect("EXISTS")
        name = cursor.qualified_name()

        if cursor.done():
            raise self._error(f"Truncated CREATE TABLE {name}: missing column list", tokens[-1])
        if not cursor.at_punct("("):
            logger.warning(f"Skipping CREATE TABLE {name} without a column list")
            return None

        open_token = cursor.advance()
        body: list[Token] = []
        depth = 1
        while True:
            token = cursor.advance()
            depth += _depth_change(token)
            if depth == 0:
                break
            body.append(token)
        if not cursor.done():
            logger.debug(f"Ignoring table options after {name}: {cursor.peek()}")

        return self._parse_body(name, body, open_token)

    def _parse_body(self, name: str, body: list[Token], open_token: Token) -> Table:
        builder = _TableBuilder(
            name=name, columns=[], primary_key=[], foreign_keys=[], constraints=[]
        )
        items = _split_depth0(body, ",") if body else []
        for item in items:
            if not item:
                raise self._error(f"Empty definition in table {name}", open_token)
            self._parse_item(builder, item)

        column_names = {column.name.lower(): column.name for column in builder.columns}
        for key_column in builder.primary_key:
            if key_column.lower() not in column_names:
                raise self._error(
                    f"Primary key column {key_column!r} not defined in table {name}", open_token
                )
        if self.strict_foreign_keys:
            for fk in builder.foreign_keys:
                for local in fk.local_columns:
                    if local.lower() not in column_names:
                        raise self._error(
                            f"Foreign key column {local!r} not defined in table {name}", open_token
                        )

        key_set = {key_column.lower() for key_column in builder.primary_key}
        columns = tuple(
            Column(
                name=column.name,
                declared_type=column.declared_type,
                nullable=column.nullable and column.name.lower() not in key_set,
                default_expr=column.default_expr,
                constraints=column.constraints,
            )
            for column in builder.columns
        )
        try:
            return Table(
                name=name,
                columns=columns,
                primary_key=tuple(builder.primary_key),
                foreign_keys=tuple(builder.foreign_keys),
                constraints=tuple(builder.constraints),
            )
        except ValueError as e:
            raise self._error(str(e), open_token) from e

    def _parse_item(self, builder: _TableBuilder, item: list[Token]) -> None:
        cursor = _Cursor(item, self._error)
        first = item[0]
        keyword = first.keyword

        if keyword == "CONSTRAINT":
            cursor.advance()
            cursor.name()
            keyword = cursor.peek_keyword()

        if keyword == "PRIMARY" and cursor.peek_keyword(1) == "KEY":
            cursor.advance()
            cursor.advance()
            if builder.primary_key:
                raise self._error(f"Multiple primary keys in table {builder.name}", first)
            builder.primary_key.extend(self._name_list(cursor))
            return
        if keyword == "FOREIGN" and cursor.peek_keyword(1) == "KEY":
            cursor.advance()
            cursor.advance()
            local = self._name_list(cursor)
            builder.foreign_keys.append(self._references(cursor, local))
            return
        is_index = keyword in _INDEX_CLAUSES and _is_index_clause(item)
        if keyword in _OPAQUE_TABLE_CLAUSES or is_index:
            builder.constraints.append(_squash(self._text[first.start : item[-1].end]))
            return

        column, foreign_keys, is_key = self._parse_column(item)
        if any(existing.name.lower() == column.name.lower() for existing in builder.columns):
            raise self._error(f"Duplicate column {column.name!r} in table {builder.name}", first)
        builder.columns.append(column)
        builder.foreign_keys.extend(foreign_keys)
        if is_key:
            if builder.primary_key:
                raise self._error(f"Multiple primary keys in table {builder.name}", first)
            builder.primary_key.append(column.name)

    def _parse_column(self, item: list[Token]) -> tuple[Column, list[ForeignKey], bool]:
        cursor = _Cursor(item, self._error)
        name = cursor.name()

        type_tokens: list[Token] = []
        while not cursor.done() and cursor.peek_keyword() not in _COLUMN_CLAUSES:
            type_tokens.append(cursor.advance())
        declared_type = (
            _squash(self._text[type_tokens[0].start : type_tokens[-1].end]) if type_tokens else ""
        )

        nullable = True
        is_key = False
        default_expr: str | None = None
        constraints: list[str] = []
        foreign_keys: list[ForeignKey] = []
        constraint_start: Token | None = None

        while not cursor.done():
            token = cursor.peek()
            assert token is not None
            keyword = token.keyword
            if keyword == "CONSTRAINT":
                constraint_start = cursor.advance()
                cursor.name()
                continue

            if keyword == "NOT" and cursor.peek_keyword(1) == "NULL":
                cursor.advance()
                cursor.advance()
                nullable = False
            elif keyword == "NULL":
                cursor.advance()
                nullable = True
            elif keyword == "PRIMARY":
                cursor.advance()
                cursor.expect("KEY")
                cursor.accept("ASC", "DESC")
                is_key = True
            elif keyword == "REFERENCES":
                foreign_keys.append(self._references(cursor, [name]))
            elif keyword == "DEFAULT":
                cursor.advance()
                if cursor.done():
                    raise self._error(f"DEFAULT without a value for column {name!r}", token)
                value = cursor.take_until(_COLUMN_CLAUSES)
                default_expr = _squash(self._text[value[0].start : value[-1].end])
            else:
                clause = cursor.take_until(_COLUMN_CLAUSES)
                start = constraint_start or clause[0]
                constraints.append(_squash(self._text[start.start : clause[-1].end]))
            constraint_start = None

        try:
            column = Column(
                name=name,
                declared_type=declared_type,
                nullable=nullable and not is_key,
                default_expr=default_expr,
                constraints=tuple(constraints),
            )
        except ValueError as e:
            raise self._error(str(e), item[0]) from e
        return column, foreign_keys, is_key

    def _name_list(self, cursor: _Cursor) -> list[str]:
        cursor.expect_punct("(")
        names = [cursor.name()]
        cursor.accept("ASC", "DESC")
        while cursor.at_punct(","):
            cursor.advance()
            names.append(cursor.name())
            cursor.accept("ASC", "DESC")
        cursor.expect_punct(")")
        return names

    def _references(self, cursor: _Cursor, local_columns: list[str]) -> ForeignKey:
        start = cursor.expect("REFERENCES")
        referenced_table = cursor.qualified_name()
        referenced_columns = self._name_list(cursor) if cursor.at_punct("(") else []

        # Referential actions and deferrability carry no information for the model
        while not cursor.done():
            if cursor.accept("ON"):
                cursor.advance()
                cursor.accept("SET", "NO")
                cursor.advance()
            elif cursor.accept("MATCH"):
                cursor.advance()
            elif cursor.accept("DEFERRABLE"):
                pass
            elif cursor.peek_keyword() == "NOT" and cursor.peek_keyword(1) == "DEFERRABLE":
                cursor.advance()
                cursor.advance()
            elif cursor.accept("INITIALLY"):
                cursor.advance()
            else:
                break

        try:
            return ForeignKey(
                local_columns=tuple(local_columns),
                referenced_table=referenced_table,
                referenced_columns=tuple(referenced_columns),
            )
        except ValueError as e:
            raise self._error(str(e), start) from e


def _is_index_clause(item: list[Token]) -> bool:
    """Tell ``KEY idx (a, b)`` apart from a column that happens to be named key."""
    if len(item) < 2:
        return False
    second = item[1]
    if second.kind == "punct" and second.text == "(":
        return True
    if len(item) >= 3 and second.is_name and item[2].kind == "punct" and item[2].text == "(":
        inner = item[3:]
        return all(token.is_name or token.text in (",", ")") for token in inner)
    return False


def parse_ddl(text: str, source_name: str = "") -> Schema:
    """Parse DDL text into a Schema.

    Args:
        text: DDL source (UTF-8 decoded)
        source_name: Label recorded on the schema

    Returns:
        Parsed schema; an empty text yields a schema with no tables

    Raises:
        DDLParseError: If the text cannot be parsed
    """
    return DDLParser().parse(text, source_name)
