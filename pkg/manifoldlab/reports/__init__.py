"""Markdown summaries of experiment reports.

Example
-------
>>> from manifoldlab.experiments import ExperimentConfig, run_experiment
>>> from manifoldlab.reports import ExperimentReportGenerator
>>>
>>> report = run_experiment(ExperimentConfig.defaults("geodesic-audit"), "out")
>>> text = ExperimentReportGenerator().generate(report, output_path="out/summary.md")
"""

from manifoldlab.reports.formatters import TableGenerator, format_value
from manifoldlab.reports.generator import (
    ExperimentReportGenerator,
    ReportConfig,
    write_markdown_report,
)

__all__ = [
    "ExperimentReportGenerator",
    "ReportConfig",
    "TableGenerator",
    "format_value",
    "write_markdown_report",
]
