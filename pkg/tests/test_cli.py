import csv
import datetime as dt
import importlib
import json
from pathlib import Path

import pytest
from loguru import logger

from commands import config_hash, run_command
from main import main
from models import DB, RunRecord, archive_run, earlier_runs
from models.schema import ReportDocument, parse_config, validate_config
from tools import KeyedSingleton
from tools.errors import ConfigError

ROOT = Path(__file__).resolve().parents[1]

# small enough for a unit test run
QUICK_ANALYZE = {"search": {"grid": 101}, "factor_samples": 51, "lower_bound_samples": 31,
                 "sublevel_eps": [1e-2, 1e-3]}
QUICK_EVOLVE = {"grid": {"resolution": 8, "box_length": 16.0}, "T": 10.0, "dt": 0.5, "output_dt": 1.0,
                "snapshots": False}


def _document(system, **sections):
    return {"system": system, **sections}


class TestConfig:

    def test_minimal_defaults(self):
        cfg = parse_config(ROOT / "configs" / "minimal.json")
        assert cfg.system.d == 1
        assert cfg.evolve.grid.resolution == 32
        assert cfg.decay.time_grid == [5.0, 10.0, 20.0, 40.0]
        assert cfg.caps.gamma_order == 2

    def test_shipped_default_is_valid(self):
        cfg = parse_config(ROOT / "configs" / "default.json")
        assert cfg.system.d == 2
        assert len(cfg.analyze.triples) == 3

    def test_length_mismatch_names_the_key(self, write_config):
        with pytest.raises(ConfigError) as err:
            parse_config(write_config({"system": {"d": 1, "b": [1.0, 2.0], "c": [1.0]}}))
        assert err.value.key_path == "system.b"
        assert err.value.message.startswith("system.b: ")

    def test_unknown_key(self, write_config):
        with pytest.raises(ConfigError) as err:
            parse_config(write_config({"system": {"d": 1, "b": [1.0], "c": [1.0]}, "colour": "red"}))
        assert err.value.key_path == "colour"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config(tmp_path / "nowhere.json")

    def test_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{\"system\": ")
        with pytest.raises(ConfigError):
            parse_config(path)

    def test_triple_index_out_of_range(self):
        with pytest.raises(ConfigError) as err:
            validate_config(_document({"d": 1, "b": [1.0], "c": [1.0]}, analyze={"triples": [[1, 1, 1], [1, 2, 1]]}))
        assert err.value.key_path == "analyze.triples[1]"

    def test_negative_mass(self):
        with pytest.raises(ConfigError) as err:
            validate_config(_document({"d": 2, "b": [1.0, -1.0], "c": [1.0, 1.0]}))
        assert err.value.key_path == "system.b[2]"
        assert err.value.exit_code == 1

    def test_hash_ignores_key_order(self):
        a = validate_config({"system": {"d": 1, "b": [1.0], "c": [1.0]}, "out": "x"})
        b = validate_config({"out": "x", "system": {"c": [1.0], "b": [1.0], "d": 1}})
        assert config_hash(a) == config_hash(b)


class TestAnalyze:

    def test_sphere_family(self, tmp_path):
        cfg = validate_config(_document({"d": 3, "b": [2.0, 1.0, 1.0], "c": [1.0, 1.0, 1.0]},
                                        analyze={"triples": [[1, 2, 3]], **QUICK_ANALYZE}))
        result = run_command("analyze", cfg, tmp_path, archive=f"sqlite:///{tmp_path / 'runs.db'}")
        assert result.exit_code == 0
        entry = result.report.results[0]
        assert entry["resonance"]["kind"] == "sphere_family"
        assert entry["resonance"]["rho"] == 0.5
        assert entry["factorization"]["reduced"]
        assert (tmp_path / "analyze.json").is_file()

    def test_single_equation(self, tmp_path):
        cfg = validate_config(_document({"d": 1, "b": [1.0], "c": [1.0]},
                                        analyze={"triples": [[1, 1, 1]], **QUICK_ANALYZE}))
        report = run_command("analyze", cfg, tmp_path, archive=f"sqlite:///{tmp_path / 'runs.db'}").report
        assert not report.errors
        entry = report.results[0]
        assert entry["resonance"]["kind"] == "empty"
        assert entry["conditions"]["assm1_holds"] and entry["conditions"]["assm2_holds"]

    def test_no_triples(self, tmp_path):
        cfg = validate_config(_document({"d": 1, "b": [1.0], "c": [1.0]}))
        result = run_command("analyze", cfg, tmp_path, archive=f"sqlite:///{tmp_path / 'runs.db'}")
        assert result.report.results == []
        assert result.exit_code == 0

    def test_reports_are_deterministic(self, tmp_path):
        cfg = validate_config(_document({"d": 3, "b": [2.0, 1.0, 1.0], "c": [1.0, 1.0, 1.0]},
                                        analyze={"triples": [[1, 2, 3]], **QUICK_ANALYZE}))
        archive = f"sqlite:///{tmp_path / 'runs.db'}"
        first = run_command("analyze", cfg, tmp_path / "a", archive=archive).report
        second = run_command("analyze", cfg, tmp_path / "b", archive=archive).report
        assert first.deterministic_json() == second.deterministic_json()
        assert "seconds" in first.wall_clock


class TestEvolve:

    def test_trajectory_rows_and_archive(self, tmp_path):
        cfg = validate_config(_document({"d": 1, "b": [1.0], "c": [1.0]}, evolve=QUICK_EVOLVE))
        url = f"sqlite:///{tmp_path / 'runs.db'}"
        result = run_command("evolve", cfg, tmp_path / "out", archive=url)
        assert result.exit_code == 0
        with open(tmp_path / "out" / "trajectory.csv") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 11
        assert float(rows[-1]["t"]) == pytest.approx(10.0)
        assert result.report.results[0]["snapshots"] == 11

        records = DB(url=url).get_all(RunRecord)
        assert [r.command for r in records] == ["evolve"]
        assert records[0].status == "ok"
        assert records[0].config_hash == config_hash(cfg)
        KeyedSingleton.forget(DB)


class TestMain:

    def test_bad_config_exits_with_one(self, write_config):
        path = write_config({"system": {"d": 1, "b": [1.0, 2.0], "c": [1.0]}})
        assert main(["analyze", "--config", str(path)]) == 1

    def test_archive_flag(self, write_config, tmp_path):
        path = write_config({"system": {"d": 1, "b": [1.0], "c": [1.0]}})
        url = f"sqlite:///{tmp_path / 'flag.db'}"
        assert main(["--archive", url, "analyze", "--config", str(path), "--out", str(tmp_path / "out")]) == 0
        assert [r.command for r in DB(url=url).get_all(RunRecord)] == ["analyze"]
        KeyedSingleton.forget(DB)

    def test_log_level_and_archive_are_not_read_from_the_environment(self, monkeypatch):
        monkeypatch.setenv("LOG_LEVEL", "ERROR")
        monkeypatch.setenv("RUN_ARCHIVE", "sqlite:///elsewhere.db")
        config = importlib.reload(importlib.import_module("config"))
        assert config.env_vars["LOG_LEVEL"] == "INFO"
        assert config.dbname == "sqlite:///runs.db"

    def test_unknown_preset(self, write_config, tmp_path):
        path = write_config({"system": {"d": 1, "b": [1.0], "c": [1.0]}})
        with pytest.raises(ConfigError):
            run_command("decay", parse_config(path), tmp_path, preset="nope",
                        archive=f"sqlite:///{tmp_path / 'runs.db'}")


class TestReportSchema:

    def test_schema_lists_the_report_fields(self):
        schema = json.loads((ROOT / "schemas" / "report.schema.json").read_text())
        assert set(schema["required"]) == set(ReportDocument.model_fields)
        assert set(schema["properties"]) == set(ReportDocument.model_fields)

    def test_config_echo_parses_again(self, tmp_path, write_config):
        cfg = parse_config(ROOT / "configs" / "minimal.json")
        report = run_command("analyze", cfg, tmp_path, archive=f"sqlite:///{tmp_path / 'runs.db'}").report
        again = validate_config(json.loads(report.deterministic_json())["config"])
        assert again == cfg


class TestArchive:

    def test_runs_for_filters_by_command(self, tmp_path):
        url = f"sqlite:///{tmp_path / 'runs.db'}"
        stamp = dt.datetime(2024, 1, 1)
        for command in ("analyze", "evolve", "analyze"):
            archive_run(url, command, "abc", stamp, 1.0, "ok")
        archive_run(url, "analyze", "other", stamp, 1.0, "ok")
        assert [r.command for r in DB(url=url).runs_for("abc")] == ["analyze", "evolve", "analyze"]
        assert len(DB(url=url).runs_for("abc", "analyze")) == 2
        KeyedSingleton.forget(DB)

    def test_earlier_runs_are_logged(self, tmp_path):
        cfg = validate_config(_document({"d": 1, "b": [1.0], "c": [1.0]}))
        url = f"sqlite:///{tmp_path / 'runs.db'}"
        messages = []
        logger.add(messages.append, level="INFO", format="{message}")
        run_command("analyze", cfg, tmp_path / "a", archive=url)
        assert not any("earlier analyze runs" in m for m in messages)
        run_command("analyze", cfg, tmp_path / "b", archive=url)
        assert any(m.startswith("1 earlier analyze runs") for m in messages)
        assert earlier_runs(url, "analyze", config_hash(cfg))[0].status == "ok"
        KeyedSingleton.forget(DB)

    def test_unreadable_archive_gives_no_runs(self):
        assert earlier_runs("nosuchdialect://nowhere", "analyze", "abc") == []


class TestVerifySuite:

    def test_default_config_is_green_and_deterministic(self, tmp_path):
        document = json.loads((ROOT / "configs" / "default.json").read_text())
        document["verify"]["skip_slow"] = True
        cfg = validate_config(document)
        url = f"sqlite:///{tmp_path / 'runs.db'}"
        first = run_command("verify", cfg, tmp_path / "a", archive=url)
        second = run_command("verify", cfg, tmp_path / "b", archive=url)
        assert first.exit_code == 0, [r["name"] for r in first.report.results if not r["passed"]]
        assert first.report.errors == []
        assert first.report.deterministic_json() == second.report.deterministic_json()
        KeyedSingleton.forget(DB)
