import json
import math

import numpy as np
import pytest

from ghalab import cli, models
from ghalab.config import DEFAULT_TOLERANCES, config_from_dict, parse_config
from ghalab.errors import ParseError, ValidationError
from ghalab.report import (
    OPERATIONS,
    coverage_audit,
    emit,
    run_suite,
    selftest_configs,
)

SMALL = {
    "truncation": {"n_levels": 24, "margin": 4},
    "grid": {"n_points": 400},
    "n_max": 10,
}


@pytest.fixture(scope="module")
def well_sigma_report():
    cfg = config_from_dict(
        {"model": "infinite_well", "deformation": {"kind": "diagonal_sigma"}, **SMALL}
    )
    return cfg, run_suite(cfg)


@pytest.fixture(scope="module")
def oscillator_report():
    cfg = config_from_dict(
        {
            "model": "harmonic_oscillator",
            "deformation": {"kind": "tanh_shift"},
            "outputs": ["report", "spectrum", "potential"],
            **SMALL,
        }
    )
    return cfg, run_suite(cfg)


class TestParseConfig:
    def test_minimal_defaults(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text('{"model": "infinite_well"}')
        cfg = parse_config(path)
        assert cfg.n_levels == 64
        assert cfg.margin == 8
        assert cfg.grid.n_points == 2000
        assert cfg.grid.x_max == pytest.approx(math.pi)
        assert cfg.tolerances == DEFAULT_TOLERANCES
        assert cfg.seed == 1234
        assert cfg.outputs == ("report",)

    def test_lambda_window(self):
        with pytest.raises(ValidationError, match="lam"):
            config_from_dict({"model": "poschl_teller", "lambda": 0.5})

    def test_quon_window(self):
        with pytest.raises(ValidationError, match="quon"):
            config_from_dict({"model": "quon", "q": 1.2})

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValidationError, match="unknown keys"):
            config_from_dict({"model": "infinite_well", "cheese": 1})

    def test_unknown_deformation_keys_rejected(self):
        with pytest.raises(ValidationError, match="deformation"):
            config_from_dict(
                {"model": "infinite_well", "deformation": {"kind": "tanh_shift", "x": 1}}
            )

    def test_all_violations_collected(self):
        with pytest.raises(ValidationError) as info:
            config_from_dict(
                {
                    "model": "quon",
                    "q": -0.5,
                    "cheese": 1,
                    "truncation": {"n_levels": 4, "margin": 9},
                }
            )
        message = str(info.value)
        assert "unknown keys" in message
        assert "quon" in message
        assert "margin" in message

    def test_parse_error_carries_position(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"model": "infinite_well",}')
        with pytest.raises(ParseError, match="line 1"):
            parse_config(path)

    def test_grid_override(self):
        cfg = config_from_dict(
            {"model": "harmonic_oscillator", "grid": {"x_min": -6.0, "x_max": 6.0, "n_points": 300}}
        )
        assert (cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n_points) == (-6.0, 6.0, 300)

    def test_sigma_samples_recipe(self):
        cfg = config_from_dict(
            {
                "model": "infinite_well",
                "deformation": {"kind": "diagonal_sigma", "sigma_samples": [2.0, 3.0, 2.5]},
                "truncation": {"n_levels": 3, "margin": 1},
                "n_max": 1,
                "grid": {"n_points": 64},
            }
        )
        np.testing.assert_allclose(
            cfg.model.deformation.sigma_values(3), [2.0, 3.0, 2.5]
        )


class TestRunSuite:
    def test_well_sigma_all_pass(self, well_sigma_report):
        _, report = well_sigma_report
        assert report.passed
        assert report.failed_names() == []

    def test_every_check_carries_identity_and_threshold(self, well_sigma_report):
        _, report = well_sigma_report
        for check in report.checks:
            assert check.identity
            assert check.threshold >= 0 or math.isnan(check.threshold)

    def test_oscillator_informational_checks_cannot_fail(self, oscillator_report):
        _, report = oscillator_report
        info = [c for c in report.checks if not c.gated]
        assert info, "expected informational checks for the printed oscillator form"
        assert all(c.passed for c in info)
        assert any(c.name == "printed_form_ho_tanh" for c in info)

    def test_effective_potential_origin_exact(self, oscillator_report):
        _, report = oscillator_report
        by_name = {c.name: c for c in report.checks}
        assert by_name["effective_potential_origin"].value == 0.0
        assert by_name["effective_potential_origin"].passed

    def test_group_selection(self, well_sigma_report):
        cfg, _ = well_sigma_report
        report = run_suite(cfg, groups=("spectrum",))
        assert [c.name for c in report.checks] == ["spectrum_recursion"]
        with pytest.raises(ValueError):
            run_suite(cfg, groups=("bogus",))

    def test_impossible_tolerance_fails_suite(self):
        cfg = config_from_dict(
            {
                "model": "infinite_well",
                "tolerances": {"algebra": 1e-30},
                **SMALL,
            }
        )
        report = run_suite(cfg, groups=("spectrum", "algebra"))
        assert not report.passed
        assert "ladder_commutator" in report.failed_names()


class TestEmission:
    def test_json_round_trip(self, tmp_path, well_sigma_report):
        _, report = well_sigma_report
        (path,) = emit(report, "json", tmp_path)
        data = json.loads(path.read_text())
        assert data["schema"] == "ghalab-report/1"
        assert data["passed"] is True
        assert data["config"]["model"] == "infinite_well"
        names = {c["name"] for c in data["checks"]}
        assert "deformed_commutator" in names
        for c in data["checks"]:
            assert set(c) == {"name", "value", "threshold", "passed", "gated", "identity", "note"}

    def test_csv_and_table(self, tmp_path, well_sigma_report):
        _, report = well_sigma_report
        (csv_path,) = emit(report, "csv", tmp_path / "csv")
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "name,value,threshold,passed,gated,identity,note"
        assert len(lines) == len(report.checks) + 1
        (txt_path,) = emit(report, "table", tmp_path / "txt")
        assert "overall: PASS" in txt_path.read_text()

    def test_potential_table_row_at_origin(self, tmp_path, oscillator_report):
        _, report = oscillator_report
        paths = emit(report, "json", tmp_path)
        potential = next(p for p in paths if p.name == "potential.csv")
        lines = potential.read_text().splitlines()
        assert lines[0] == "x,V_eff"
        assert "0.0,-2.0" in lines

    def test_spectrum_table_well(self, tmp_path):
        cfg = config_from_dict(
            {"model": "infinite_well", "outputs": ["report", "spectrum"], **SMALL}
        )
        report = run_suite(cfg, groups=("spectrum",))
        paths = emit(report, "json", tmp_path)
        spectrum = next(p for p in paths if p.name == "spectrum.csv")
        lines = spectrum.read_text().splitlines()
        assert lines[0] == "n,analytic,computed,error"
        row = lines[3].split(",")  # n = 2
        assert row[0] == "2"
        assert float(row[1]) == 9.0
        assert float(row[3]) < 1e-3 * 9.0

    def test_byte_stable_across_runs(self, tmp_path):
        raw = {
            "model": "infinite_well",
            "deformation": {"kind": "diagonal_sigma"},
            "seed": 777,
            **SMALL,
        }
        blobs = []
        for tag in ("a", "b"):
            cfg = config_from_dict(dict(raw))
            report = run_suite(cfg)
            (path,) = emit(report, "json", tmp_path / tag)
            blobs.append(path.read_bytes())
        assert blobs[0] == blobs[1]


class TestCoverage:
    def test_selftest_configs_cover_every_operation(self):
        # static audit over the ops each check declares; the CLI selftest
        # runs the same configs end to end
        reports = []
        for cfg in selftest_configs():
            reports.append(run_suite(cfg))
        covered, missing = coverage_audit(reports)
        assert not missing, f"operations unreachable from configs: {sorted(missing)}"
        assert covered == OPERATIONS
        assert all(r.passed for r in reports)


class TestCli:
    def test_verify_exit_zero(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"model": "infinite_well", **SMALL}))
        assert cli.main(["verify", "--config", str(path)]) == 0

    def test_report_writes_files(self, tmp_path, capsys):
        path = tmp_path / "c.json"
        path.write_text(
            json.dumps(
                {"model": "infinite_well", "deformation": {"kind": "diagonal_sigma"}, **SMALL}
            )
        )
        out = tmp_path / "out"
        code = cli.main(
            ["report", "--config", str(path), "--out", str(out), "--format", "json"]
        )
        assert code == 0
        assert (out / "report.json").exists()
        assert "wrote" in capsys.readouterr().out

    def test_spectrum_prints_rows(self, tmp_path, capsys):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"model": "infinite_well", **SMALL}))
        assert cli.main(["spectrum", "--config", str(path)]) == 0
        out = capsys.readouterr().out
        assert "n,analytic,computed,error" in out

    def test_config_error_exit_two(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text('{"model": "quon", "q": 2.0}')
        assert cli.main(["verify", "--config", str(path)]) == 2

    def test_parse_error_exit_two(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("{nope")
        assert cli.main(["verify", "--config", str(path)]) == 2

    def test_failing_check_exit_one(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(
            json.dumps(
                {"model": "infinite_well", "tolerances": {"algebra": 1e-30}, **SMALL}
            )
        )
        assert cli.main(["verify", "--config", str(path)]) == 1

    def test_io_error_exit_three(self, tmp_path):
        blocker = tmp_path / "blocked"
        blocker.write_text("a file, not a directory")
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"model": "infinite_well", **SMALL}))
        code = cli.main(
            ["verify", "--config", str(path), "--out", str(blocker / "sub")]
        )
        assert code == 3

    def test_seed_override_changes_echo(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"model": "infinite_well", **SMALL}))
        out = tmp_path / "out"
        cli.main(
            ["verify", "--config", str(path), "--out", str(out), "--format", "json", "--seed", "9"]
        )
        data = json.loads((out / "report.json").read_text())
        assert data["config"]["seed"] == 9

    def test_potential_command_defaults(self, tmp_path):
        out = tmp_path / "out"
        code = cli.main(["potential", "--out", str(out), "--format", "json"])
        assert code == 0
        assert (out / "potential.csv").exists()
