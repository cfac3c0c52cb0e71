# this_file: schemaroles/utils/fileio.py
"""Atomic file persistence helpers."""

from __future__ import annotations

import os
import stat
import tempfile
from functools import cache
from pathlib import Path

from loguru import logger


@cache
def process_umask() -> int:
    """The process umask, read once."""
    mask = os.umask(0o022)
    os.umask(mask)
    return mask


def target_mode(path: Path) -> int:
    """Permission bits for a replacement of path.

    An existing file keeps its mode; a new file gets 0o666 minus the umask,
    as a plain ``open(path, "w")`` would.
    """
    try:
        return stat.S_IMODE(path.stat().st_mode)
    except FileNotFoundError:
        return 0o666 & ~process_umask()


def atomic_write_bytes(path: Path, data: bytes) -> None:
    """Write bytes to a path through a temporary sibling file and a rename.

    Readers observe either the previous content or the complete new
    content, never a torn file. The temporary file is removed on failure.

    Args:
        path: Destination file
        data: Bytes to persist

    Raises:
        OSError: If the directory cannot be created or the write/rename fails
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    tmp_path = Path(tmp_name)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        tmp_path.chmod(target_mode(path))
        tmp_path.replace(path)
    except BaseException:
        tmp_path.unlink(missing_ok=True)
        raise
    logger.debug(f"Atomically wrote {len(data)} bytes to {path}")


def atomic_write_text(path: Path, text: str) -> None:
    """Write UTF-8 text atomically.

    Args:
        path: Destination file
        text: Text to persist
    """
    atomic_write_bytes(path, text.encode("utf-8"))
