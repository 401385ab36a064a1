"""End-to-end tests for the command-line runner.

Commands run in-process through ``cli.main`` with small configurations
so the whole battery stays fast; reports are parsed back from the
output directory and checked against the documented schema.
"""

import csv
import json
import math
import os

import pytest

from modnet import cli


def _write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def _run(tmp_path, command, config=None, extra=()):
    argv = [command, "--out", str(tmp_path / "out")]
    if config is not None:
        argv += ["--config", _write_config(tmp_path, "cfg.json", config)]
    argv += list(extra)
    code = cli.main(argv)
    report_path = tmp_path / "out" / f"{command}.json"
    report = json.loads(report_path.read_text()) if report_path.exists() \
        else None
    return code, report


# ---------------------------------------------------------------------------
# configuration handling
# ---------------------------------------------------------------------------


def test_defaults_used_without_config():
    cfg = cli.load_config("trace-class", None)
    assert cfg == cli.DEFAULT_CONFIGS["trace-class"]


def test_missing_config_file_is_a_config_error():
    with pytest.raises(cli.ConfigError, match="cannot read"):
        cli.load_config("trace-class", "/nonexistent/cfg.json")


def test_empty_config_file_rejected(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("", encoding="utf-8")
    with pytest.raises(cli.ConfigError, match="empty"):
        cli.load_config("trace-class", str(path))


def test_empty_object_config_rejected(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("{}", encoding="utf-8")
    with pytest.raises(cli.ConfigError, match="empty"):
        cli.load_config("trace-class", str(path))


def test_malformed_json_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{betas: oops", encoding="utf-8")
    with pytest.raises(cli.ConfigError, match="not valid JSON"):
        cli.load_config("trace-class", str(path))


def test_unknown_key_rejected(tmp_path):
    path = _write_config(tmp_path, "cfg.json", {"bogus": 1})
    with pytest.raises(cli.ConfigError, match="unknown config key"):
        cli.load_config("trace-class", str(path))


def test_wrong_value_type_rejected(tmp_path):
    path = _write_config(tmp_path, "cfg.json", {"betas": "half"})
    with pytest.raises(cli.ConfigError, match="must be a list"):
        cli.load_config("trace-class", str(path))


def test_config_errors_exit_with_status_two(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("", encoding="utf-8")
    code = cli.main(["trace-class", "--config", str(empty),
                     "--out", str(tmp_path / "out")])
    assert code == cli.EXIT_CONFIG_ERROR


def test_missing_command_is_a_usage_error():
    with pytest.raises(SystemExit):
        cli.main([])


# ---------------------------------------------------------------------------
# report schema and determinism
# ---------------------------------------------------------------------------


def test_report_schema_fields(tmp_path):
    code, report = _run(tmp_path, "trace-class")
    assert code == cli.EXIT_OK
    assert report["schema"] == cli.REPORT_SCHEMA
    assert report["command"] == "trace-class"
    assert report["passed"] is True
    assert report["seed"] == 0
    assert set(report["config"]) == set(cli.DEFAULT_CONFIGS["trace-class"])
    for entry in report["checks"]:
        assert set(entry) == {"name", "residual", "budget", "formula",
                              "passed"}
        assert entry["name"] in cli.CHECK_NAMES["trace-class"]
    for key in ("python", "numpy", "scipy", "mpmath", "platform"):
        assert key in report["environment"]
    assert report["timestamp"]["wall_time_s"] >= 0.0


def test_reports_are_deterministic_modulo_timestamp(tmp_path):
    cfg = {"samples": 40, "seed": 3}
    _, first = _run(tmp_path / "a", "verify-mobius", cfg)
    _, second = _run(tmp_path / "b", "verify-mobius", cfg)
    first.pop("timestamp")
    second.pop("timestamp")
    assert json.dumps(first, sort_keys=True) == \
        json.dumps(second, sort_keys=True)


def test_seed_flag_overrides_config(tmp_path):
    code, report = _run(tmp_path, "spin-statistics", {"pairs": 10, "seed": 1},
                        extra=["--seed", "5"])
    assert code == cli.EXIT_OK
    assert report["seed"] == 5
    assert report["config"]["seed"] == 5


def test_budget_scale_can_force_failures(tmp_path):
    code, report = _run(tmp_path, "trace-class",
                        extra=["--budget-scale", "1e-40"])
    assert code == cli.EXIT_CHECK_FAILURE
    failed = [e["name"] for e in report["checks"] if not e["passed"]]
    assert "trace-class-truncation" in failed
    assert report["budget_scale"] == 1e-40


def test_environment_variable_sets_output_directory(tmp_path, monkeypatch):
    target = tmp_path / "from-env"
    monkeypatch.setenv(cli.OUT_ENV_VAR, str(target))
    code = cli.main(["spin-statistics"])
    assert code == cli.EXIT_OK
    assert (target / "spin-statistics.json").exists()


def test_internal_errors_exit_with_status_three(tmp_path, monkeypatch):
    def boom(cfg, rng, scale):
        raise RuntimeError("synthetic failure")

    monkeypatch.setitem(cli.RUNNERS, "trace-class", boom)
    code = cli.main(["trace-class", "--out", str(tmp_path / "out")])
    assert code == cli.EXIT_INTERNAL_ERROR


# ---------------------------------------------------------------------------
# individual commands
# ---------------------------------------------------------------------------


def test_verify_mobius_passes(tmp_path):
    code, report = _run(tmp_path, "verify-mobius", {"samples": 60})
    assert code == cli.EXIT_OK
    worst = max(e["residual"] for e in report["checks"])
    assert worst < 1e-11


def test_verify_stdspace_passes(tmp_path):
    code, report = _run(tmp_path, "verify-stdspace",
                        {"dim": 6, "samples": 6})
    assert code == cli.EXIT_OK
    assert len(report["checks"]) == 6


def test_bgl_axioms_chiral_passes(tmp_path):
    code, report = _run(tmp_path, "bgl-axioms", {"n": 9})
    assert code == cli.EXIT_OK
    names = {e["name"] for e in report["checks"]}
    assert "dilation-bisognano-wichmann" in names
    assert (tmp_path / "out" / "bgl-axioms-entries.csv").exists()


def test_bgl_axioms_twisted_fails_expected_entry(tmp_path):
    code, report = _run(tmp_path, "bgl-axioms",
                        {"model": "twisted", "n": 17})
    assert code == cli.EXIT_CHECK_FAILURE
    failed = {e["name"] for e in report["checks"] if not e["passed"]}
    assert failed == {"dilation-bisognano-wichmann"}


def test_bgl_axioms_unknown_model_is_config_error(tmp_path):
    code, report = _run(tmp_path, "bgl-axioms", {"model": "heat-bath"})
    assert code == cli.EXIT_CONFIG_ERROR
    assert report is None


def test_bgl_axioms_bad_grid_is_config_error(tmp_path):
    code, _ = _run(tmp_path, "bgl-axioms", {"model": "massive", "n": 9})
    assert code == cli.EXIT_CONFIG_ERROR


def test_reconstruct_mobius_passes_and_writes_table(tmp_path):
    code, report = _run(tmp_path, "reconstruct-mobius",
                        {"n": 9, "t_values": [0.5, 1.0]})
    assert code == cli.EXIT_OK
    with open(tmp_path / "out" / "reconstruct-mobius-flow.csv",
              newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [float(r["t"]) for r in rows] == [0.5, 1.0]
    assert all(float(r["identity_residual"]) < 1e-7 for r in rows)


def test_reconstruct_mobius_off_grid_time_is_config_error(tmp_path):
    code, _ = _run(tmp_path, "reconstruct-mobius",
                   {"n": 9, "t_values": [0.3]})
    assert code == cli.EXIT_CONFIG_ERROR


def test_break_bw_charged_passes_with_expected_failure_shape(tmp_path):
    code, report = _run(tmp_path, "break-bw", {"n": 17, "charge": 1.0})
    assert code == cli.EXIT_OK
    with open(tmp_path / "out" / "break-bw-deviation.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        predicted = abs(2 * math.sin(math.pi * float(row["t"])) * 1.0)
        assert float(row["deviation"]) == pytest.approx(
            predicted, abs=1e-8)
        assert float(row["deviation"]) == pytest.approx(
            float(row["predicted"]), abs=1e-8)


def test_break_bw_uncharged_passes(tmp_path):
    code, report = _run(tmp_path, "break-bw", {"n": 17, "charge": 0.0})
    assert code == cli.EXIT_OK
    with open(tmp_path / "out" / "break-bw-deviation.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert all(float(r["deviation"]) < 1e-8 for r in rows)


def test_lightcone_defect_small_ladder(tmp_path):
    code, report = _run(tmp_path, "lightcone-defect",
                        {"ladder": [[9, 1], [17, 2]], "frozen": 0.96})
    assert code == cli.EXIT_OK
    with open(tmp_path / "out" / "lightcone-defect-ladder.csv",
              newline="") as fh:
        rows = list(csv.DictReader(fh))
    defects = [float(r["defect"]) for r in rows]
    assert defects == sorted(defects, reverse=True)
    assert defects[-1] < 0.96


def test_spin_statistics_passes(tmp_path):
    code, report = _run(tmp_path, "spin-statistics", {"pairs": 25})
    assert code == cli.EXIT_OK
    assert all(e["passed"] for e in report["checks"])


def test_trace_class_table_contents(tmp_path):
    code, _ = _run(tmp_path, "trace-class")
    assert code == cli.EXIT_OK
    with open(tmp_path / "out" / "trace-class-partition.csv",
              newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3
    for row in rows:
        assert float(row["relative_error"]) < 1e-20
        assert float(row["abs_diff"]) <= float(row["tail_bound"]) + 1e-30


def test_fock_checks_pass(tmp_path):
    code, report = _run(tmp_path, "fock-checks",
                        {"modes": 2, "order": 8, "samples": 2})
    assert code == cli.EXIT_OK
    assert len(report["checks"]) == len(cli.CHECK_NAMES["fock-checks"])


def test_halperin_bench_passes_and_reports_iterations(tmp_path):
    code, report = _run(tmp_path, "halperin-bench",
                        {"dim": 6, "pairs": 6})
    assert code == cli.EXIT_OK
    with open(tmp_path / "out" / "halperin-bench-pairs.csv",
              newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 6
    assert all(int(r["iteration_cap"]) > 0 for r in rows)
    assert all(float(r["distance"]) < 1e-7 for r in rows)


# ---------------------------------------------------------------------------
# manifest coverage
# ---------------------------------------------------------------------------


def test_every_check_name_is_documented():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    with open(os.path.join(root, "docs", "checks.md"), encoding="utf-8") as fh:
        manifest = fh.read()
    documented = {line[4:].strip() for line in manifest.splitlines()
                  if line.startswith("### ")}
    declared = {name for names in cli.CHECK_NAMES.values() for name in names}
    assert declared <= documented, declared - documented
    assert documented <= declared, documented - declared


def test_commands_and_defaults_are_aligned():
    assert set(cli.RUNNERS) == set(cli.CHECK_NAMES)
    assert set(cli.RUNNERS) == set(cli.DEFAULT_CONFIGS)
    for command, cfg in cli.DEFAULT_CONFIGS.items():
        assert "seed" in cfg, command
