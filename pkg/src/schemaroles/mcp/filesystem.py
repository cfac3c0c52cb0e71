# this_file: schemaroles/mcp/filesystem.py
"""Sandboxed filesystem tools as an MCP server."""

from __future__ import annotations

import threading
from collections.abc import Iterable, Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from loguru import logger

from schemaroles import __version__
from schemaroles.mcp.protocol import McpServer, Tool, ToolDescriptor, ToolError, ToolResult
from schemaroles.utils.fileio import atomic_write_text

SERVER_NAME = "schemaroles-filesystem"

ACCESS_DENIED = "access denied"
NOT_FOUND = "not found"


class SandboxError(ToolError):
    """Raised when a path resolves outside every allowed directory."""

    def __init__(self, path: str):
        self.path = path
        super().__init__(f"{ACCESS_DENIED}: {path}")


@dataclass(frozen=True)
class FsServerConfig:
    """Filesystem server settings.

    Attributes:
        allowed_dirs: Existing directories, canonicalized (absolute, symlinks resolved)
        read_only: Reject write_file
    """

    allowed_dirs: tuple[Path, ...]
    read_only: bool = False

    def __post_init__(self) -> None:
        if not self.allowed_dirs:
            raise ValueError("allowed_dirs must not be empty")
        canonical: list[Path] = []
        for directory in self.allowed_dirs:
            resolved = Path(directory).expanduser().resolve()
            if not resolved.is_dir():
                raise ValueError(f"Allowed directory does not exist: {directory}")
            if resolved not in canonical:
                canonical.append(resolved)
        object.__setattr__(self, "allowed_dirs", tuple(canonical))

    @classmethod
    def from_paths(cls, paths: Iterable[Path | str], read_only: bool = False) -> FsServerConfig:
        return cls(allowed_dirs=tuple(Path(path) for path in paths), read_only=read_only)


class Sandbox:
    """Maps requested paths to canonical paths inside the allowed directories."""

    def __init__(self, allowed_dirs: tuple[Path, ...]):
        self.allowed_dirs = allowed_dirs

    def resolve(self, requested: str) -> Path:
        """Canonicalize a requested path and check containment.

        Relative paths are taken relative to the first allowed directory.
        Symlinks are resolved before the check.

        Raises:
            SandboxError: If the canonical path is outside every allowed directory
        """
        try:
            candidate = Path(requested).expanduser()
            if not candidate.is_absolute():
                candidate = self.allowed_dirs[0] / candidate
            resolved = candidate.resolve()
        except (OSError, RuntimeError, ValueError) as e:
            logger.debug(f"Cannot resolve {requested!r}: {e}")
            raise SandboxError(requested) from e

        if not any(resolved.is_relative_to(root) for root in self.allowed_dirs):
            logger.warning(f"Sandbox escape rejected: {requested!r} -> {resolved}")
            raise SandboxError(requested)
        return resolved

    def contains(self, requested: str) -> bool:
        try:
            self.resolve(requested)
        except SandboxError:
            return False
        return True


_PATH_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {"path": {"type": "string", "description": "File or directory path"}},
    "required": ["path"],
    "additionalProperties": False,
}

LIST_DIRECTORY = ToolDescriptor(
    name="list_directory",
    description="List the entries of a directory sorted by name, marked as file or directory.",
    input_schema=_PATH_SCHEMA,
)
READ_TEXT_FILE = ToolDescriptor(
    name="read_text_file",
    description="Read a UTF-8 text file and return its content.",
    input_schema=_PATH_SCHEMA,
)
READ_FILE = ToolDescriptor(
    name="read_file",
    description="Alias of read_text_file.",
    input_schema=_PATH_SCHEMA,
)
WRITE_FILE = ToolDescriptor(
    name="write_file",
    description="Create or replace a UTF-8 text file atomically.",
    input_schema={
        "type": "object",
        "properties": {
            "path": {"type": "string", "description": "File path"},
            "content": {"type": "string", "description": "Complete new file content"},
        },
        "required": ["path", "content"],
        "additionalProperties": False,
    },
)


@dataclass
class _PathLock:
    lock: threading.Lock = field(default_factory=threading.Lock)
    users: int = 0


class FilesystemTools:
    """Tool handlers confined to a sandbox. Writes to one path are serialized."""

    def __init__(self, config: FsServerConfig):
        self.config = config
        self.sandbox = Sandbox(config.allowed_dirs)
        self._locks: dict[Path, _PathLock] = {}
        self._locks_guard = threading.Lock()
        logger.debug(
            f"Initialized FilesystemTools: dirs={[str(d) for d in config.allowed_dirs]}, "
            f"read_only={config.read_only}"
        )

    @contextmanager
    def _locked(self, path: Path) -> Iterator[None]:
        """Hold the write lock of one path; the entry is dropped when its last user leaves."""
        with self._locks_guard:
            entry = self._locks.get(path)
            if entry is None:
                entry = self._locks[path] = _PathLock()
            entry.users += 1
        try:
            with entry.lock:
                yield
        finally:
            with self._locks_guard:
                entry.users -= 1
                if entry.users == 0:
                    del self._locks[path]

    def list_directory(self, arguments: dict[str, Any]) -> ToolResult:
        path = self.sandbox.resolve(arguments["path"])
        if not path.exists():
            raise ToolError(f"{NOT_FOUND}: {arguments['path']}")
        if not path.is_dir():
            raise ToolError(f"not a directory: {arguments['path']}")
        entries = [
            {"name": entry.name, "kind": "directory" if entry.is_dir() else "file"}
            for entry in sorted(path.iterdir(), key=lambda entry: entry.name)
        ]
        return ToolResult.json({"path": str(path), "entries": entries})

    def read_text_file(self, arguments: dict[str, Any]) -> ToolResult:
        path = self.sandbox.resolve(arguments["path"])
        if not path.exists():
            raise ToolError(f"{NOT_FOUND}: {arguments['path']}")
        if not path.is_file():
            raise ToolError(f"not a file: {arguments['path']}")
        try:
            return ToolResult.text(path.read_bytes().decode("utf-8"))
        except UnicodeDecodeError as e:
            raise ToolError(f"not a UTF-8 text file: {arguments['path']}") from e
        except OSError as e:
            raise ToolError(f"cannot read {arguments['path']}: {e.strerror or e}") from e

    def write_file(self, arguments: dict[str, Any]) -> ToolResult:
        if self.config.read_only:
            raise ToolError(f"{ACCESS_DENIED}: server is read-only")
        path = self.sandbox.resolve(arguments["path"])
        if path.is_dir():
            raise ToolError(f"is a directory: {arguments['path']}")
        content: str = arguments["content"]
        with self._locked(path):
            try:
                atomic_write_text(path, content)
            except OSError as e:
                raise ToolError(f"cannot write {arguments['path']}: {e.strerror or e}") from e
        size = len(content.encode("utf-8"))
        logger.info(f"write_file: {size} bytes -> {path}")
        return ToolResult.text(f"Wrote {size} bytes to {path}")


def create_filesystem_server(config: FsServerConfig) -> McpServer:
    """Build the sandboxed filesystem MCP server.

    Exposes list_directory, read_text_file (also as read_file) and write_file.
    """
    tools = FilesystemTools(config)
    return McpServer(
        SERVER_NAME,
        __version__,
        [
            Tool(LIST_DIRECTORY, tools.list_directory),
            Tool(READ_TEXT_FILE, tools.read_text_file),
            Tool(READ_FILE, tools.read_text_file),
            Tool(WRITE_FILE, tools.write_file),
        ],
    )
