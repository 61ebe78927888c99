"""Tests for CLI interface."""

import json

import pytest

from manifoldlab import __version__
from manifoldlab.cli.commands.listing import format_listing
from manifoldlab.cli.main import main
from manifoldlab.experiments import EXPERIMENTS


@pytest.fixture
def write_config(tmp_path):
    """Write a config mapping to a JSON file and return its path."""

    def _write(data, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    return _write


class TestCLIMain:
    """Tests for main CLI entry point."""

    def test_no_args_shows_help(self, capsys):
        """Test that no arguments shows help."""
        result = main([])
        assert result == 0
        captured = capsys.readouterr()
        assert "ManifoldLab" in captured.out
        assert "commands" in captured.out

    def test_version(self, capsys):
        """Test --version flag."""
        with pytest.raises(SystemExit) as exc_info:
            main(["--version"])
        assert exc_info.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_help(self, capsys):
        """Test --help flag."""
        with pytest.raises(SystemExit) as exc_info:
            main(["--help"])
        assert exc_info.value.code == 0

    def test_unknown_command(self, capsys):
        """Test an unknown command is a usage error."""
        with pytest.raises(SystemExit) as exc_info:
            main(["fit"])
        assert exc_info.value.code == 2


class TestCLIList:
    """Tests for 'list' command."""

    def test_list(self, capsys):
        """Test every experiment is listed."""
        result = main(["list"])
        assert result == 0
        out = capsys.readouterr().out
        for name in EXPERIMENTS:
            assert name in out
        assert out.count("checks:") == len(EXPERIMENTS)

    def test_format_listing_layout(self):
        """Test name line followed by indented description."""
        lines = format_listing().splitlines()
        assert lines[0] == "universality"
        assert lines[1].startswith("    ")
        assert lines[2].startswith("    checks: ")


class TestCLIRun:
    """Tests for 'run' command."""

    def test_run_geodesic_audit(self, write_config, tmp_path, capsys):
        """Test a small audit runs and prints its summary."""
        path = write_config({"experiment": "geodesic-audit", "manifolds": ["circle"], "trials": 2})
        out_dir = tmp_path / "out"
        result = main(["run", path, "--out", str(out_dir), "-q"])
        captured = capsys.readouterr()
        assert result in (0, 2)
        assert "Experiment: geodesic-audit" in captured.out
        assert "targets met" in captured.out
        assert "Report:" in captured.out
        assert (out_dir / "report.json").exists()

    def test_run_missing_config(self, tmp_path, capsys):
        """Test a missing config file is an error."""
        result = main(["run", str(tmp_path / "missing.json")])
        assert result == 1
        assert "Error: cannot read config" in capsys.readouterr().err

    def test_run_invalid_config(self, write_config, capsys):
        """Test a negative epsilon is reported with its key."""
        path = write_config({"experiment": "universality", "epsilon": -0.1})
        result = main(["run", path])
        assert result == 1
        err = capsys.readouterr().err
        assert "epsilon" in err
        assert "offending keys" in err

    def test_run_stage_failure_names_stage(self, write_config, tmp_path, capsys):
        """Test a failing stage is named in the error."""
        path = write_config({"experiment": "cycle", "delta": 1e-6})
        result = main(["run", path, "--out", str(tmp_path / "out")])
        assert result == 1
        assert "in stage 'subsets' of experiment 'cycle'" in capsys.readouterr().err

    def test_verbose_and_quiet_conflict(self, write_config):
        """Test -v and -q are mutually exclusive."""
        path = write_config({"experiment": "cycle"})
        with pytest.raises(SystemExit) as exc_info:
            main(["run", path, "-v", "-q"])
        assert exc_info.value.code == 2
