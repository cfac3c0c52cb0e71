#!/usr/bin/env python3
# this_file: schemaroles/cli.py
"""Command-line interface: MCP servers, the mapping workflow and frame queries.

Usage:
    schemaroles serve-propbank --frames ./frames [--transport http --bind 127.0.0.1:8811]
    schemaroles serve-fs ./output ./schemas [--read_only]
    schemaroles map --ddl rel-avito.sql --frames ./frames [--out output --db rel-avito]
    schemaroles coordinate --ddl rel-avito.sql [--out output --db rel-avito]
    schemaroles validate --ddl rel-avito.sql [--out output --db rel-avito --strict]
    schemaroles frames search --lemma order --frames ./frames
    schemaroles frames show --sense_id order.02 --frames ./frames

Every query command accepts --json for machine-readable output on stdout.
Exit codes: 0 success, 1 domain failure, 2 fatal input error, 64 usage error.
"""

from __future__ import annotations

import json
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import fire
from loguru import logger
from rich.console import Console
from rich.table import Table as RichTable

from schemaroles.config import CliConfig, ConfigError, load_cli_config
from schemaroles.ddl import DDLParseError, Schema, Table, TableNotFoundError, parse_ddl
from schemaroles.frames import FrameIndex, FrameLoadError, FrameNotFoundError, load_frame_corpus
from schemaroles.mapping import (
    MappingParseError,
    MappingValidationError,
    MappingValidator,
    StatusKind,
    classify_mapping_file,
    deserialize_mapping,
    mapping_path,
)
from schemaroles.mcp import (
    FsServerConfig,
    create_filesystem_server,
    create_propbank_server,
    serve_http,
    serve_stdio,
)
from schemaroles.mcp.http import DEFAULT_BIND, DEFAULT_ENDPOINT, parse_bind
from schemaroles.pipeline import (
    MapperConfig,
    Orchestrator,
    OrchestratorLockedError,
    ProviderError,
    ProviderRegistry,
    coordinate as coordinate_schema,
)
from schemaroles.pipeline.coordinator import STATUS_STYLES
from schemaroles.utils.logging import configure_logging

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_FATAL = 2
EXIT_USAGE = 64

TRANSPORTS = ("stdio", "http")


class CommandExit(Exception):
    """Terminates a command with a specific exit code."""

    def __init__(self, code: int, message: str = ""):
        self.code = code
        self.message = message
        super().__init__(message or f"exit {code}")


def _emit_json(payload: Any) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    sys.stdout.flush()


def _split_names(value: str | Sequence[str] | None) -> list[str] | None:
    if value is None:
        return None
    if isinstance(value, str):
        return [name.strip() for name in value.split(",") if name.strip()]
    return [str(name) for name in value]


class _Session:
    """Resolved configuration plus the consoles of one command invocation."""

    def __init__(self, flags: dict[str, Any], config_file: str | None):
        try:
            self.config: CliConfig = load_cli_config(flags, config_file=config_file)
        except ConfigError as e:
            raise CommandExit(EXIT_USAGE, str(e)) from e
        configure_logging(self.config.log_level)
        self.console = Console()

    def load_index(self) -> FrameIndex:
        if self.config.frames_dir is None:
            raise CommandExit(EXIT_USAGE, "Missing --frames (or SCHEMAROLES_FRAMES_DIR)")
        try:
            return load_frame_corpus(self.config.frames_dir)
        except FrameLoadError as e:
            raise CommandExit(EXIT_FATAL, str(e)) from e

    @staticmethod
    def load_schema(ddl: str | None) -> Schema:
        if ddl is None:
            raise CommandExit(EXIT_USAGE, "Missing --ddl")
        path = Path(str(ddl))
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise CommandExit(EXIT_FATAL, f"Cannot read DDL file {path}: {e}") from e
        try:
            return parse_ddl(text, path.name)
        except DDLParseError as e:
            raise CommandExit(EXIT_FATAL, f"{path}: {e}") from e


def _db_name(db: Any, ddl: str | None) -> str:
    if db is not None:
        return str(db)
    if ddl is None:
        raise CommandExit(EXIT_USAGE, "Missing --ddl")
    return Path(str(ddl)).stem


class FramesCommands:
    """Query the PropBank frame corpus."""

    def search(
        self,
        lemma: str | None = None,
        max_results: int = 10,
        frames: str | None = None,
        json: bool = False,
        log_level: str | None = None,
        config: str | None = None,
    ) -> None:
        """List the rolesets of a lemma.

        Args:
            lemma: Lemma or inflected form, e.g. "order"
            max_results: Result cap
            frames: Frame corpus directory
            json: Print JSON instead of a table
            log_level: loguru level
            config: TOML config file
        """
        session = _Session({"frames_dir": frames, "log_level": log_level}, config)
        if lemma is None:
            raise CommandExit(EXIT_USAGE, "Missing --lemma")
        index = session.load_index()
        try:
            rolesets = index.search_by_lemma(str(lemma), max_results)
        except ValueError as e:
            raise CommandExit(EXIT_USAGE, str(e)) from e

        if json:
            _emit_json(
                {
                    "lemma": str(lemma),
                    "count": len(rolesets),
                    "rolesets": [roleset.to_summary_dict() for roleset in rolesets],
                }
            )
            return
        if not rolesets:
            session.console.print(f"No rolesets for lemma {lemma!r}")
            return
        table = RichTable(title=f"Rolesets for {lemma!r}")
        table.add_column("Sense", style="bold", no_wrap=True)
        table.add_column("Definition")
        table.add_column("Roles", overflow="fold")
        for roleset in rolesets:
            roles = ", ".join(f"{role.label}: {role.description}" for role in roleset.roles)
            table.add_row(roleset.sense_id, roleset.definition, roles)
        session.console.print(table)

    def show(
        self,
        sense_id: str | None = None,
        include_examples: bool = True,
        frames: str | None = None,
        json: bool = False,
        log_level: str | None = None,
        config: str | None = None,
    ) -> None:
        """Show one roleset with roles, examples and lexical links.

        Args:
            sense_id: Roleset identifier, e.g. "order.02"
            include_examples: Include annotated examples
            frames: Frame corpus directory
            json: Print JSON instead of a table
            log_level: loguru level
            config: TOML config file
        """
        session = _Session({"frames_dir": frames, "log_level": log_level}, config)
        if sense_id is None:
            raise CommandExit(EXIT_USAGE, "Missing --sense_id")
        index = session.load_index()
        try:
            roleset = index.search_by_sense_id(str(sense_id), include_examples)
        except FrameNotFoundError as e:
            raise CommandExit(EXIT_FAILURE, str(e)) from e

        if json:
            _emit_json(roleset.to_dict())
            return
        table = RichTable(title=f"{roleset.sense_id}: {roleset.definition}")
        table.add_column("Role", style="bold", no_wrap=True)
        table.add_column("Description")
        for role in roleset.roles:
            table.add_row(role.label, role.description)
        session.console.print(table)
        if roleset.aliases:
            session.console.print(f"Aliases: {', '.join(roleset.aliases)}")
        for example in roleset.examples:
            session.console.print(f"  [italic]{example.text}[/italic]")
        for link in roleset.lexlinks:
            session.console.print(f"  {link.resource}: {link.identifier}")


class SchemaRolesCLI:
    """Map relational schemas to PropBank rolesets."""

    def __init__(self) -> None:
        self.frames = FramesCommands()

    def serve_propbank(
        self,
        frames: str | None = None,
        transport: str = "stdio",
        bind: str = DEFAULT_BIND,
        endpoint: str = DEFAULT_ENDPOINT,
        log_level: str | None = None,
        config: str | None = None,
    ) -> None:
        """Serve search_by_lemma and search_by_sense_id over MCP.

        Args:
            frames: Frame corpus directory
            transport: "stdio" or "http"
            bind: host:port for the http transport
            endpoint: URL path for the http transport
            log_level: loguru level (logs go to stderr)
            config: TOML config file
        """
        session = _Session({"frames_dir": frames, "log_level": log_level}, config)
        if transport not in TRANSPORTS:
            raise CommandExit(
                EXIT_USAGE, f"Unknown transport {transport!r}; use one of {TRANSPORTS}"
            )
        if transport == "http":
            try:
                parse_bind(str(bind))
            except ValueError as e:
                raise CommandExit(EXIT_USAGE, str(e)) from e
            if not str(endpoint).startswith("/"):
                raise CommandExit(EXIT_USAGE, f"endpoint must start with '/', got {endpoint!r}")

        server = create_propbank_server(session.load_index())
        if transport == "http":
            serve_http(server, str(bind), str(endpoint))
        else:
            serve_stdio(server)

    def serve_fs(
        self,
        *dirs: str,
        read_only: bool = False,
        log_level: str | None = None,
        config: str | None = None,
    ) -> None:
        """Serve a sandboxed filesystem over MCP stdio.

        Args:
            dirs: Allowed directories
            read_only: Reject write_file
            log_level: loguru level (logs go to stderr)
            config: TOML config file
        """
        _Session({"log_level": log_level}, config)
        if not dirs:
            raise CommandExit(EXIT_USAGE, "At least one allowed directory is required")
        try:
            fs_config = FsServerConfig.from_paths([str(d) for d in dirs], read_only=read_only)
        except ValueError as e:
            raise CommandExit(EXIT_FATAL, str(e)) from e
        serve_stdio(create_filesystem_server(fs_config))

    def map(
        self,
        ddl: str | None = None,
        db: str | None = None,
        out: str | None = None,
        frames: str | None = None,
        max_rolesets: int | None = None,
        num_verbs: int | None = None,
        min_confidence: float | None = None,
        concurrency: int | None = None,
        max_iterations: int | None = None,
        provider: str | None = None,
        json: bool = False,
        log_level: str | None = None,
        config: str | None = None,
    ) -> None:
        """Map every table of a DDL file until all mapping files are VALID.

        Args:
            ddl: DDL file
            db: Database name (default: DDL file stem)
            out: Output folder root
            frames: Frame corpus directory
            max_rolesets: Mappings kept per table
            num_verbs: Candidate verbs per table
            min_confidence: Confidence floor
            concurrency: Mappers in flight
            max_iterations: Coordinate/map rounds
            provider: Verb provider name or package.module:Factory
            json: Print the run report as JSON
            log_level: loguru level
            config: TOML config file
        """
        session = _Session(
            {
                "frames_dir": frames,
                "output_folder": out,
                "max_rolesets_per_table": max_rolesets,
                "num_verbs": num_verbs,
                "min_confidence": min_confidence,
                "concurrency": concurrency,
                "max_iterations": max_iterations,
                "provider": provider,
                "log_level": log_level,
            },
            config,
        )
        cfg = session.config
        schema = session.load_schema(ddl)
        db_name = _db_name(db, ddl)
        index = session.load_index()
        try:
            verb_provider = ProviderRegistry.create(cfg.provider, {"index": index})
        except ProviderError as e:
            raise CommandExit(EXIT_FATAL, str(e)) from e

        orchestrator = Orchestrator(
            schema,
            index,
            cfg.output_folder,
            db_name,
            provider=verb_provider,
            cfg=MapperConfig(
                max_rolesets_per_table=cfg.max_rolesets_per_table,
                num_verbs=cfg.num_verbs,
                min_confidence=cfg.min_confidence,
            ),
            concurrency=cfg.concurrency,
            max_iterations=cfg.max_iterations,
        )
        try:
            report = orchestrator.run()
        except OrchestratorLockedError as e:
            raise CommandExit(EXIT_FAILURE, str(e)) from e

        if json:
            _emit_json(report.to_dict())
        else:
            session.console.print(report.to_rich_table())
            session.console.print(f"{len(report.tables_mapped_this_run)} tables mapped")
            for table_name, error in report.failures:
                session.console.print(f"[red]{table_name}[/red]: {error}")
        if not report.all_valid:
            raise CommandExit(EXIT_FAILURE)

    def coordinate(
        self,
        ddl: str | None = None,
        out: str | None = None,
        db: str | None = None,
        json: bool = False,
        log_level: str | None = None,
        config: str | None = None,
    ) -> None:
        """Report the mapping status of every table.

        Args:
            ddl: DDL file
            out: Output folder root
            db: Database name (default: DDL file stem)
            json: Print JSON instead of a table
            log_level: loguru level
            config: TOML config file
        """
        session = _Session({"output_folder": out, "log_level": log_level}, config)
        schema = session.load_schema(ddl)
        report = coordinate_schema(schema, session.config.output_folder, _db_name(db, ddl))
        if json:
            _emit_json(report.to_dict())
        else:
            session.console.print(report.to_rich_table())
            pending = f"{len(report.todo)} of {len(report.statuses)} tables need mapping"
            session.console.print(pending)

    def validate(
        self,
        ddl: str | None = None,
        out: str | None = None,
        db: str | None = None,
        tables: str | Sequence[str] | None = None,
        strict: bool = False,
        json: bool = False,
        log_level: str | None = None,
        config: str | None = None,
    ) -> None:
        """Validate mapping files; exit 0 only if every requested table is VALID.

        Args:
            ddl: DDL file
            out: Output folder root
            db: Database name (default: DDL file stem)
            tables: Comma-separated table names (default: all)
            strict: Also warn about role values that are not columns of the table
            json: Print JSON instead of a table
            log_level: loguru level
            config: TOML config file
        """
        session = _Session({"output_folder": out, "log_level": log_level}, config)
        schema = session.load_schema(ddl)
        db_name = _db_name(db, ddl)
        output_folder = session.config.output_folder

        requested = _split_names(tables) or list(schema.table_names)
        try:
            selected = [schema.table(name) for name in requested]
        except TableNotFoundError as e:
            raise CommandExit(EXIT_FAILURE, str(e)) from e

        results: dict[str, dict[str, Any]] = {}
        for table in selected:
            status = classify_mapping_file(output_folder, db_name, table.name)
            warnings: list[str] = []
            if strict and status.kind is StatusKind.VALID:
                path = mapping_path(output_folder, db_name, table.name)
                warnings = _grounding_warnings(path, table)
            results[table.name] = {**status.to_dict(), "warnings": warnings}
        all_valid = all(result["status"] == StatusKind.VALID for result in results.values())
        logger.info(f"Validated {len(results)} table(s) of {db_name}: all_valid={all_valid}")

        if json:
            _emit_json({"db_name": db_name, "all_valid": all_valid, "tables": results})
        else:
            table_view = RichTable(title=f"Validation: {db_name}")
            table_view.add_column("Table", style="bold")
            table_view.add_column("Status")
            table_view.add_column("Detail", overflow="fold")
            for name, result in results.items():
                style = STATUS_STYLES[StatusKind(result["status"])]
                table_view.add_row(name, f"[{style}]{result['status']}[/{style}]", result["detail"])
            session.console.print(table_view)
            for name, result in results.items():
                for warning in result["warnings"]:
                    session.console.print(f"[yellow]warning[/yellow] {name}: {warning}")
        if not all_valid:
            raise CommandExit(EXIT_FAILURE)


def _grounding_warnings(path: Path, table: Table) -> list[str]:
    try:
        output = deserialize_mapping(path.read_bytes())
    except (OSError, MappingParseError, MappingValidationError) as e:
        return [f"cannot re-read mapping: {e}"]
    validator = MappingValidator(strict=True, table=table)
    validator.validate(output)
    return list(validator.warnings)


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the process exit code."""
    command = list(sys.argv[1:] if argv is None else argv)
    try:
        fire.Fire(SchemaRolesCLI(), command=command, name="schemaroles")
    except CommandExit as e:
        if e.message:
            Console(stderr=True).print(f"[red]Error:[/red] {e.message}", highlight=False)
        return e.code
    except fire.core.FireExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
