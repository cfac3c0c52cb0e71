# this_file: tests/conftest.py
"""Shared fixtures: the vendored frame corpus and DDL schemas."""

from pathlib import Path

import pytest

from schemaroles.ddl import Schema, parse_ddl
from schemaroles.frames import FrameIndex, load_frame_corpus

FIXTURES = Path(__file__).parent / "fixtures"
FRAMES_DIR = FIXTURES / "frames"
REL_AVITO_DDL = FIXTURES / "rel-avito.sql"
WATCH_STORE_DDL = FIXTURES / "watch_store.sql"
GOLDEN_DIR = FIXTURES / "golden"

REL_AVITO_TABLES = [
    "Users",
    "Categories",
    "Locations",
    "Ads",
    "AdInfo",
    "ItemInfo",
    "SearchInfo",
    "PhoneRequests",
]


@pytest.fixture(scope="session")
def frame_index() -> FrameIndex:
    """Index over the vendored frame corpus, loaded once per session."""
    return load_frame_corpus(FRAMES_DIR)


@pytest.fixture(scope="session")
def rel_avito() -> Schema:
    return parse_ddl(REL_AVITO_DDL.read_text(encoding="utf-8"), REL_AVITO_DDL.name)


@pytest.fixture(scope="session")
def watch_store() -> Schema:
    return parse_ddl(WATCH_STORE_DDL.read_text(encoding="utf-8"), WATCH_STORE_DDL.name)


@pytest.fixture
def orders_schema() -> Schema:
    """Order table with a customer FK, a product FK and a creation timestamp."""
    return parse_ddl(
        """
        CREATE TABLE Users (user_id INTEGER PRIMARY KEY, name TEXT);
        CREATE TABLE Products (product_id INTEGER PRIMARY KEY, title TEXT);
        CREATE TABLE Orders (
            order_id INTEGER PRIMARY KEY,
            customer_id INTEGER REFERENCES Users (user_id),
            product_id INTEGER REFERENCES Products (product_id),
            created_at TIMESTAMP
        );
        """,
        "orders.sql",
    )
