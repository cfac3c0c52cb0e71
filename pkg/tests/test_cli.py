# this_file: tests/test_cli.py
"""Tests for the schemaroles command line."""

import json
import os

import pytest
from loguru import logger

from schemaroles.cli import EXIT_FAILURE, EXIT_FATAL, EXIT_OK, EXIT_USAGE, main

from .conftest import FRAMES_DIR, REL_AVITO_DDL, REL_AVITO_TABLES


@pytest.fixture(autouse=True)
def isolated(monkeypatch, tmp_path):
    """Run every command from an empty directory without SCHEMAROLES_* variables."""
    for name in list(os.environ):
        if name.startswith("SCHEMAROLES_"):
            monkeypatch.delenv(name)
    monkeypatch.chdir(tmp_path)
    yield
    logger.remove()
    logger.disable("schemaroles")


def map_args(out, *extra):
    return [
        "map",
        "--ddl",
        str(REL_AVITO_DDL),
        "--frames",
        str(FRAMES_DIR),
        "--out",
        str(out),
        *extra,
    ]


class TestMap:
    """Test the map command."""

    def test_fresh_then_rerun(self, tmp_path, capsys):
        """Test a complete run, then a rerun that maps nothing."""
        out = tmp_path / "out"
        assert main(map_args(out)) == EXIT_OK
        assert "8 tables mapped" in capsys.readouterr().out
        assert sorted(path.stem for path in (out / "rel-avito").glob("*.json")) == sorted(
            REL_AVITO_TABLES
        )

        assert main(map_args(out)) == EXIT_OK
        assert "0 tables mapped" in capsys.readouterr().out

    def test_json_report(self, tmp_path, capsys):
        assert main([*map_args(tmp_path / "out", "--json"), "--db", "avito"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["db_name"] == "avito"
        assert report["all_valid"] is True
        assert report["iterations"] == 2
        assert list(report["final_statuses"]) == REL_AVITO_TABLES

    def test_options_reach_the_mapper(self, tmp_path):
        out = tmp_path / "out"
        assert main(map_args(out, "--max_rolesets", "1", "--concurrency", "1")) == EXIT_OK
        document = json.loads((out / "rel-avito" / "Ads.json").read_text(encoding="utf-8"))
        assert len(document["mappings"]) == 1

    def test_environment_supplies_frames(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SCHEMAROLES_FRAMES_DIR", str(FRAMES_DIR))
        args = ["map", "--ddl", str(REL_AVITO_DDL), "--out", str(tmp_path / "out")]
        assert main(args) == EXIT_OK

    def test_missing_ddl(self, capsys):
        assert main(["map", "--frames", str(FRAMES_DIR)]) == EXIT_USAGE
        assert "Missing --ddl" in capsys.readouterr().err

    def test_missing_frames(self, tmp_path):
        args = ["map", "--ddl", str(REL_AVITO_DDL), "--out", str(tmp_path / "out")]
        assert main(args) == EXIT_USAGE

    def test_bad_frames_dir(self, tmp_path):
        assert main(map_args(tmp_path / "out", "--frames", str(tmp_path / "none"))) == EXIT_FATAL

    def test_unparsable_ddl(self, tmp_path, capsys):
        ddl = tmp_path / "broken.sql"
        ddl.write_text("CREATE TABLE t (a INT", encoding="utf-8")
        args = ["map", "--ddl", str(ddl), "--frames", str(FRAMES_DIR)]
        assert main(args) == EXIT_FATAL
        assert capsys.readouterr().err.startswith("Error:")

    def test_unknown_provider(self, tmp_path):
        assert main(map_args(tmp_path / "out", "--provider", "oracle")) == EXIT_FATAL

    def test_failing_provider_factory(self, tmp_path, capsys):
        args = map_args(tmp_path / "out", "--provider", "tests.test_mapper:failing_factory")
        assert main(args) == EXIT_FATAL
        assert "model offline" in " ".join(capsys.readouterr().err.split())

    def test_invalid_option_value(self, tmp_path):
        assert main(map_args(tmp_path / "out", "--concurrency", "0")) == EXIT_USAGE

    def test_locked_output(self, tmp_path, capsys):
        out = tmp_path / "out"
        out.mkdir()
        (out / "rel-avito.lock").write_text(f"{os.getpid()}\n", encoding="utf-8")
        assert main(map_args(out)) == EXIT_FAILURE
        assert "locked" in capsys.readouterr().err

    def test_config_file(self, tmp_path):
        config = tmp_path / "custom.toml"
        config.write_text(
            f'[schemaroles]\nframes_dir = "{FRAMES_DIR.as_posix()}"\nmax_rolesets_per_table = 2\n',
            encoding="utf-8",
        )
        out = tmp_path / "out"
        args = ["map", "--ddl", str(REL_AVITO_DDL), "--out", str(out), "--config", str(config)]
        assert main(args) == EXIT_OK
        document = json.loads((out / "rel-avito" / "Users.json").read_text(encoding="utf-8"))
        assert len(document["mappings"]) <= 2


class TestCoordinate:
    """Test the coordinate command."""

    def test_fresh_folder(self, tmp_path, capsys):
        args = ["coordinate", "--ddl", str(REL_AVITO_DDL), "--out", str(tmp_path / "out")]
        assert main(args) == EXIT_OK
        assert "8 of 8 tables need mapping" in capsys.readouterr().out

    def test_json(self, tmp_path, capsys):
        args = ["coordinate", "--ddl", str(REL_AVITO_DDL), "--out", str(tmp_path), "--json"]
        assert main(args) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["db_name"] == "rel-avito"
        assert report["todo"] == REL_AVITO_TABLES
        assert {status["status"] for status in report["statuses"].values()} == {"MISSING"}

    def test_after_map(self, tmp_path, capsys):
        main(map_args(tmp_path / "out"))
        capsys.readouterr()
        args = ["coordinate", "--ddl", str(REL_AVITO_DDL), "--out", str(tmp_path / "out")]
        assert main([*args, "--json"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["todo"] == []


class TestValidate:
    """Test the validate command."""

    def validate_args(self, out, *extra):
        return ["validate", "--ddl", str(REL_AVITO_DDL), "--out", str(out), *extra]

    def test_valid_after_map(self, tmp_path, capsys):
        out = tmp_path / "out"
        main(map_args(out))
        capsys.readouterr()

        assert main(self.validate_args(out, "--json")) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["all_valid"] is True
        assert list(report["tables"]) == REL_AVITO_TABLES

    def test_missing_files(self, tmp_path):
        assert main(self.validate_args(tmp_path)) == EXIT_FAILURE

    def test_selected_tables(self, tmp_path, capsys):
        out = tmp_path / "out"
        main(map_args(out))
        (out / "rel-avito" / "Ads.json").write_text("{}", encoding="utf-8")
        capsys.readouterr()

        assert main(self.validate_args(out, "--tables", "Users,Locations")) == EXIT_OK
        assert main(self.validate_args(out, "--tables", "Ads", "--json")) == EXIT_FAILURE
        report = json.loads(capsys.readouterr().out)
        assert report["tables"]["Ads"]["status"] == "ERROR"

    def test_unknown_table(self, tmp_path, capsys):
        assert main(self.validate_args(tmp_path, "--tables", "Nope")) == EXIT_FAILURE
        assert "Table not found" in capsys.readouterr().err

    def test_strict_warnings(self, tmp_path, capsys):
        """Test that free-text role values are reported as warnings, not failures."""
        out = tmp_path / "out"
        main(map_args(out))
        capsys.readouterr()

        args = self.validate_args(out, "--tables", "Ads", "--strict", "--json")
        assert main(args) == EXIT_OK
        warnings = json.loads(capsys.readouterr().out)["tables"]["Ads"]["warnings"]
        assert any("'audience' is not a column of Ads" in warning for warning in warnings)


class TestFrames:
    """Test the frames query commands."""

    def test_search_json(self, capsys):
        args = ["frames", "search", "--lemma", "order", "--frames", str(FRAMES_DIR), "--json"]
        assert main(args) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert [roleset["sense_id"] for roleset in payload["rolesets"]] == [
            "order.01",
            "order.02",
            "order.03",
        ]

    def test_search_table(self, capsys):
        args = ["frames", "search", "--lemma", "order", "--frames", str(FRAMES_DIR)]
        assert main(args) == EXIT_OK
        assert "order.02" in capsys.readouterr().out

    def test_search_no_results(self, capsys):
        args = ["frames", "search", "--lemma", "xyzzy", "--frames", str(FRAMES_DIR)]
        assert main(args) == EXIT_OK
        assert "No rolesets" in capsys.readouterr().out

    def test_show(self, capsys):
        args = ["frames", "show", "--sense_id", "order.02", "--frames", str(FRAMES_DIR), "--json"]
        assert main(args) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["roles"][0] == {"label": "ARG0", "description": "orderer"}

    def test_show_unknown(self, capsys):
        args = ["frames", "show", "--sense_id", "order.99", "--frames", str(FRAMES_DIR)]
        assert main(args) == EXIT_FAILURE
        assert "Roleset not found: order.99" in capsys.readouterr().err


class TestServe:
    """Test argument checks of the server commands (the servers themselves are in test_mcp)."""

    def test_unknown_transport(self):
        args = ["serve-propbank", "--frames", str(FRAMES_DIR), "--transport", "carrier-pigeon"]
        assert main(args) == EXIT_USAGE

    def test_bad_bind(self):
        args = ["serve-propbank", "--frames", str(FRAMES_DIR), "--transport", "http"]
        assert main([*args, "--bind", "nowhere"]) == EXIT_USAGE

    def test_fs_needs_directories(self):
        assert main(["serve-fs"]) == EXIT_USAGE

    def test_fs_missing_directory(self, tmp_path):
        assert main(["serve-fs", str(tmp_path / "missing")]) == EXIT_FATAL


class TestUsage:
    def test_unknown_command(self):
        assert main(["explode"]) == EXIT_USAGE
