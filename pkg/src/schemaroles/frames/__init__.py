# this_file: schemaroles/frames/__init__.py
"""PropBank frame corpus loading and queries."""

from schemaroles.frames.index import (
    FrameIndex,
    FrameNotFoundError,
    search_by_lemma,
    search_by_sense_id,
)
from schemaroles.frames.loader import FrameLoadError, FrameLoadReport, load_frame_corpus
from schemaroles.frames.model import FrameExample, LexLink, Role, Roleset

__all__ = [
    "FrameExample",
    "FrameIndex",
    "FrameLoadError",
    "FrameLoadReport",
    "FrameNotFoundError",
    "LexLink",
    "Role",
    "Roleset",
    "load_frame_corpus",
    "search_by_lemma",
    "search_by_sense_id",
]
