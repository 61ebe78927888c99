"""Unit tests for the reports module."""

import math

import numpy as np
import pytest

import manifoldlab
from manifoldlab.experiments import ExperimentReport, TargetCheck
from manifoldlab.reports import (
    ExperimentReportGenerator,
    ReportConfig,
    TableGenerator,
    format_value,
    write_markdown_report,
)


@pytest.fixture
def sample_report():
    """Report with one passing and one failing target."""
    report = ExperimentReport(
        "cycle",
        {"seed": 7, "delta": 0.05, "training": {"epochs": 3, "learning_rate": 0.01}},
    )
    report.add_target("fit_eps", 0.01, "<", 0.05)
    report.add_target("composition_bound_ok", 0.0, "==", 1.0)
    report.add_metric("lipschitz_g", 0.5)
    report.timings["training"] = 1.25
    report.details["loss_history"] = [1.0, 0.5, 0.25, 0.125]
    report.artifacts.extend(["report.json", "forward.mlnet"])
    return report


# =============================================================================
# format_value Tests
# =============================================================================


class TestFormatValue:
    """Tests for format_value."""

    @pytest.mark.parametrize(
        "value, expected",
        [
            (0.000012345, "1.2345e-05"),
            (3.0, "3"),
            (np.float64(2.5), "2.5"),
            (np.int64(4), "4"),
            (True, "yes"),
            (False, "no"),
            ([1, 2.5], "1, 2.5"),
            (None, "None"),
            ("circle", "circle"),
        ],
    )
    def test_values(self, value, expected):
        """Test compact formatting of common cell values."""
        assert format_value(value) == expected

    def test_non_finite(self):
        """Test non-finite floats are written out."""
        assert format_value(math.inf) == "inf"

    def test_digits(self):
        """Test significant digits."""
        assert format_value(math.pi, digits=3) == "3.14"


# =============================================================================
# TableGenerator Tests
# =============================================================================


class TestTableGenerator:
    """Tests for TableGenerator class."""

    def test_parameters_table(self):
        """Test parameters table generation."""
        result = TableGenerator.parameters_table([("epsilon", "0.05", "ambient length")])

        assert "| Parameter |" in result
        assert "| epsilon | 0.05 | ambient length |" in result
        assert "|:---" in result

    def test_metrics_table_sorted(self):
        """Test metrics appear in key order."""
        result = TableGenerator.metrics_table({"b": 2.0, "a": 1.0})
        lines = result.splitlines()

        assert lines[2] == "| a | 1 |"
        assert lines[3] == "| b | 2 |"

    def test_targets_table(self):
        """Test pass and fail rows."""
        checks = [
            TargetCheck.evaluate("hausdorff", 0.01, "<", 0.05),
            TargetCheck.evaluate("rank", 1.0, ">=", 2.0),
        ]
        result = TableGenerator.targets_table(checks)

        assert "| hausdorff | 0.01 | < 0.05 | pass |" in result
        assert "| rank | 1 | >= 2 | FAIL |" in result

    def test_series_table_short(self):
        """Test series table for short series."""
        result = TableGenerator.series_table([1.0, 0.5, 0.25], max_rows=10)

        assert "| Epoch | MSE |" in result
        assert "| 2 | 2.5000e-01 |" in result
        assert "..." not in result

    def test_series_table_long_abbreviated(self):
        """Test series table abbreviation for long series."""
        result = TableGenerator.series_table(np.zeros(100), max_rows=20)

        assert "..." in result
        assert "100 rows" in result
        assert "| 99 |" in result


# =============================================================================
# ExperimentReportGenerator Tests
# =============================================================================


class TestExperimentReportGenerator:
    """Tests for ExperimentReportGenerator class."""

    def test_header(self, sample_report):
        """Test header names the experiment, version and status."""
        text = ExperimentReportGenerator().generate(sample_report)

        assert text.startswith("# Experiment report: cycle")
        assert f"v{manifoldlab.__version__}" in text
        assert "master seed 7" in text
        assert "**Status:** FAILED (1/2 targets met)" in text

    def test_sections(self, sample_report):
        """Test every section is present."""
        text = ExperimentReportGenerator().generate(sample_report)

        for header in (
            "## Configuration",
            "## Targets",
            "## Metrics",
            "## Stage timings",
            "## Training loss",
            "## Artifacts",
        ):
            assert header in text
        assert "| training.epochs | 3 | - |" in text
        assert "| delta | 0.05 | normalised measure |" in text
        assert "- `forward.mlnet`" in text

    def test_passed_status(self):
        """Test a report without failing targets is PASSED."""
        report = ExperimentReport("universality", {"seed": 0})
        report.add_target("network_hausdorff", 0.01, "<", 0.05)

        assert "PASSED" in ExperimentReportGenerator().generate(report)

    def test_optional_sections(self, sample_report):
        """Test timings and loss can be left out."""
        config = ReportConfig(include_timings=False, include_loss=False)
        text = ExperimentReportGenerator(config).generate(sample_report)

        assert "## Stage timings" not in text
        assert "## Training loss" not in text

    def test_deterministic(self, sample_report):
        """Test the same report renders identically."""
        generator = ExperimentReportGenerator()

        assert generator.generate(sample_report) == generator.generate(sample_report)

    def test_write_markdown_report(self, sample_report, tmp_path):
        """Test writing to a nested path."""
        path = write_markdown_report(sample_report, tmp_path / "a" / "report.md")

        assert path.exists()
        assert path.read_text(encoding="utf-8").startswith("# Experiment report: cycle")
