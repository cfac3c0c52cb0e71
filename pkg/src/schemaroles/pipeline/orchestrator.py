# this_file: schemaroles/pipeline/orchestrator.py
"""Orchestrator: coordinate, map the pending tables in parallel, repeat."""

from __future__ import annotations

import os
import tempfile
import time
import uuid
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from types import TracebackType
from typing import Any

from loguru import logger
from rich.table import Table as RichTable

from schemaroles.ddl.context import table_context
from schemaroles.ddl.model import Schema
from schemaroles.ddl.parser import parse_ddl
from schemaroles.frames.index import FrameIndex
from schemaroles.mapping.status import MappingStatus, StatusKind
from schemaroles.pipeline.coordinator import STATUS_STYLES, CoordinatorReport, coordinate
from schemaroles.pipeline.mapper import (
    DEFAULT_WEIGHTS,
    ConfidenceWeights,
    MapperConfig,
    map_table,
)
from schemaroles.pipeline.providers import BaselineVerbProvider, VerbProvider

DEFAULT_CONCURRENCY = 4
DEFAULT_MAX_ITERATIONS = 3
TAKEOVER_ATTEMPTS = 3


class OrchestratorLockedError(Exception):
    """Raised when another live run holds the output folder lock."""

    def __init__(self, lock_path: Path, pid: int | None = None):
        """Initialize lock error.

        Args:
            lock_path: Path of the lock file
            pid: Process id recorded in the lock, when readable
        """
        self.lock_path = lock_path
        self.pid = pid
        holder = f" by pid {pid}" if pid is not None else ""
        super().__init__(f"Output folder is locked{holder}: {lock_path}")


def _lock_holder(path: Path) -> int | None:
    try:
        return int(path.read_text(encoding="utf-8").strip())
    except (OSError, ValueError):
        return None


def _pid_alive(pid: int) -> bool:
    if pid <= 0:
        return False
    try:
        os.kill(pid, 0)
    except ProcessLookupError:
        return False
    except PermissionError:
        return True
    return True


class RunLock:
    """Advisory lock file holding the owner's pid.

    The lock file is staged with its content and hard-linked into place, so
    it is never observed half-written. A lock left behind by a process that
    no longer exists is renamed aside before it is replaced; only one
    contender can win that rename.
    """

    def __init__(self, path: Path):
        self.path = path
        self.acquired = False

    def acquire(self) -> None:
        """Create the lock file.

        Raises:
            OrchestratorLockedError: If a live process holds the lock
        """
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, staged_name = tempfile.mkstemp(
            dir=self.path.parent, prefix=f".{self.path.name}.", suffix=".tmp"
        )
        staged = Path(staged_name)
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(f"{os.getpid()}\n")
            staged.chmod(0o644)
            for _ in range(TAKEOVER_ATTEMPTS):
                try:
                    os.link(staged, self.path)
                except FileExistsError:
                    pid = _lock_holder(self.path)
                    if pid is not None and _pid_alive(pid):
                        raise OrchestratorLockedError(self.path, pid) from None
                    self._take_over(pid)
                    continue
                self.acquired = True
                logger.debug(f"Acquired lock {self.path}")
                return
        finally:
            staged.unlink(missing_ok=True)
        raise OrchestratorLockedError(self.path)

    def _take_over(self, observed: int | None) -> None:
        """Remove a lock judged stale, unless a live run replaced it meanwhile.

        Raises:
            OrchestratorLockedError: If the file moved aside belongs to a live process
        """
        aside = self.path.with_name(f".{self.path.name}.{uuid.uuid4().hex}.stale")
        try:
            os.rename(self.path, aside)
        except FileNotFoundError:
            return
        try:
            pid = _lock_holder(aside)
            if pid is not None and _pid_alive(pid):
                try:
                    os.link(aside, self.path)
                except FileExistsError:
                    logger.warning(f"Could not restore lock {self.path} of pid {pid}")
                raise OrchestratorLockedError(self.path, pid)
            logger.warning(f"Removed stale lock {self.path} (pid {observed})")
        finally:
            aside.unlink(missing_ok=True)

    def release(self) -> None:
        if self.acquired:
            self.path.unlink(missing_ok=True)
            self.acquired = False
            logger.debug(f"Released lock {self.path}")

    def __enter__(self) -> RunLock:
        self.acquire()
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        traceback: TracebackType | None,
    ) -> None:
        self.release()


def lock_path(output_folder: Path | str, db_name: str) -> Path:
    """Lock file of a run: ``output_folder/db_name.lock``."""
    return Path(output_folder) / f"{db_name}.lock"


@dataclass(frozen=True)
class RunReport:
    """Outcome of an orchestrator run.

    Attributes:
        db_name: Database name
        iterations: Coordinate/map rounds performed (>= 1)
        final_statuses: Status of every table after the run, schema order
        tables_mapped_this_run: Tables whose file was written, in write order
        elapsed: Wall time in seconds
        failures: (table, last error) for tables that are still not VALID
    """

    db_name: str
    iterations: int
    final_statuses: dict[str, MappingStatus] = field(default_factory=dict)
    tables_mapped_this_run: tuple[str, ...] = ()
    elapsed: float = 0.0
    failures: tuple[tuple[str, str], ...] = ()

    @property
    def all_valid(self) -> bool:
        return all(status.kind is StatusKind.VALID for status in self.final_statuses.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "db_name": self.db_name,
            "iterations": self.iterations,
            "all_valid": self.all_valid,
            "final_statuses": {
                name: status.to_dict() for name, status in self.final_statuses.items()
            },
            "tables_mapped_this_run": list(self.tables_mapped_this_run),
            "elapsed_seconds": round(self.elapsed, 3),
            "failures": [{"table": table, "error": error} for table, error in self.failures],
        }

    def to_rich_table(self) -> RichTable:
        """Render final statuses as a rich table."""
        table = RichTable(
            title=(
                f"Run {self.db_name}: {len(self.tables_mapped_this_run)} tables mapped, "
                f"{self.iterations} iteration(s), {self.elapsed:.2f}s"
            )
        )
        table.add_column("Table", style="bold")
        table.add_column("Status")
        table.add_column("Detail", overflow="fold")
        errors = dict(self.failures)
        for name, status in self.final_statuses.items():
            style = STATUS_STYLES[status.kind]
            detail = errors.get(name, status.detail)
            table.add_row(name, f"[{style}]{status.kind.value}[/{style}]", detail)
        return table


class Orchestrator:
    """Runs coordinate -> parallel map_table rounds until every table is VALID.

    Each round coordinates once, then maps every pending table with at most
    `concurrency` mappers in flight. Tables already VALID at the start of a
    round are never written. A failing table is retried in the next round;
    the run stops after `max_iterations` rounds.
    """

    def __init__(
        self,
        schema: Schema,
        index: FrameIndex,
        output_folder: Path | str,
        db_name: str,
        provider: VerbProvider | None = None,
        cfg: MapperConfig | None = None,
        concurrency: int = DEFAULT_CONCURRENCY,
        max_iterations: int = DEFAULT_MAX_ITERATIONS,
        weights: ConfidenceWeights = DEFAULT_WEIGHTS,
    ):
        """Initialize orchestrator.

        Args:
            schema: Parsed schema
            index: Loaded frame index, shared read-only by all mappers
            output_folder: Output folder root
            db_name: Database name (output subfolder)
            provider: Verb provider (default: baseline over the index)
            cfg: Mapper configuration (default: MapperConfig())
            concurrency: Maximum mappers in flight (>= 1)
            max_iterations: Maximum coordinate/map rounds (>= 1)
            weights: Confidence formula weights

        Raises:
            ValueError: If concurrency or max_iterations is below 1
        """
        if concurrency < 1:
            raise ValueError(f"concurrency must be >= 1, got {concurrency}")
        if max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {max_iterations}")
        if not db_name:
            raise ValueError("db_name must be non-empty")

        self.schema = schema
        self.index = index
        self.output_folder = Path(output_folder)
        self.db_name = db_name
        self.provider = provider or BaselineVerbProvider({"index": index})
        self.cfg = cfg or MapperConfig()
        self.concurrency = concurrency
        self.max_iterations = max_iterations
        self.weights = weights
        logger.debug(
            f"Initialized Orchestrator for {db_name}: {len(schema.tables)} tables, "
            f"concurrency={concurrency}, max_iterations={max_iterations}"
        )

    def coordinate(self) -> CoordinatorReport:
        return coordinate(self.schema, self.output_folder, self.db_name)

    def run(self) -> RunReport:
        """Run until complete or out of iterations.

        Returns:
            The run report

        Raises:
            OrchestratorLockedError: If another run holds the output folder
        """
        started = time.monotonic()
        mapped: list[str] = []
        last_error: dict[str, str] = {}
        iterations = 0

        with RunLock(lock_path(self.output_folder, self.db_name)):
            report = self.coordinate()
            for iteration in range(1, self.max_iterations + 1):
                iterations = iteration
                if iteration > 1:
                    report = self.coordinate()
                logger.bind(
                    event="orchestrator.iteration",
                    iteration=iteration,
                    todo=list(report.todo),
                ).info(f"Iteration {iteration}: {len(report.todo)} table(s) to map")
                if report.is_complete:
                    break

                succeeded, failed = self._dispatch(report.todo)
                mapped.extend(succeeded)
                last_error.update(failed)
            else:
                report = self.coordinate()

        failures = tuple(
            (name, last_error[name])
            for name, status in report.statuses.items()
            if status.needs_mapping and name in last_error
        )
        run_report = RunReport(
            db_name=self.db_name,
            iterations=iterations,
            final_statuses=dict(report.statuses),
            tables_mapped_this_run=tuple(mapped),
            elapsed=time.monotonic() - started,
            failures=failures,
        )
        logger.bind(event="orchestrator.run", **run_report.to_dict()).info(
            f"Run finished for {self.db_name}: {len(mapped)} mapped, "
            f"{'complete' if run_report.all_valid else 'incomplete'}"
        )
        return run_report

    def _map_one(self, table_name: str) -> None:
        ctx = table_context(self.schema, table_name)
        map_table(
            ctx,
            self.index,
            self.provider,
            self.cfg,
            self.output_folder,
            self.db_name,
            self.weights,
        )

    def _dispatch(self, todo: tuple[str, ...]) -> tuple[list[str], dict[str, str]]:
        """Map the pending tables with bounded parallelism; failures are captured."""
        succeeded: list[str] = []
        failed: dict[str, str] = {}
        with ThreadPoolExecutor(
            max_workers=self.concurrency, thread_name_prefix="schemaroles-mapper"
        ) as pool:
            futures: dict[str, Future[None]] = {
                name: pool.submit(self._map_one, name) for name in todo
            }
            for name, future in futures.items():
                try:
                    future.result()
                except Exception as e:
                    logger.error(f"Mapping {name} failed: {e}")
                    failed[name] = f"{type(e).__name__}: {e}"
                else:
                    succeeded.append(name)
        return succeeded, failed


def run(
    ddl_file: Path | str,
    db_name: str,
    output_folder: Path | str,
    cfg: MapperConfig | None = None,
    concurrency: int = DEFAULT_CONCURRENCY,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    *,
    index: FrameIndex,
    provider: VerbProvider | None = None,
) -> RunReport:
    """Parse a DDL file and run the orchestrator over it.

    Args:
        ddl_file: UTF-8 DDL file
        db_name: Database name (output subfolder)
        output_folder: Output folder root
        cfg: Mapper configuration
        concurrency: Maximum mappers in flight
        max_iterations: Maximum coordinate/map rounds
        index: Loaded frame index
        provider: Verb provider (default: baseline)

    Returns:
        The run report

    Raises:
        DDLParseError: If the DDL cannot be parsed
        OSError: If the DDL file cannot be read
        OrchestratorLockedError: If another run holds the output folder
    """
    path = Path(ddl_file)
    schema = parse_ddl(path.read_text(encoding="utf-8"), path.name)
    orchestrator = Orchestrator(
        schema,
        index,
        output_folder,
        db_name,
        provider=provider,
        cfg=cfg,
        concurrency=concurrency,
        max_iterations=max_iterations,
    )
    return orchestrator.run()
