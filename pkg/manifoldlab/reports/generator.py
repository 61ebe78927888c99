"""Markdown summary of an experiment report.

The summary mirrors ``report.json``: configuration, pass/fail per target,
all metrics, stage timings and the list of written artifacts.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, List, Optional, Tuple, Union

import manifoldlab
from manifoldlab.experiments.report import ExperimentReport
from manifoldlab.reports.formatters import TableGenerator, format_value
from manifoldlab.reports.templates import (
    PARAMETER_UNITS,
    REPORT_HEADER_TEMPLATE,
    SECTION_HEADERS,
)


@dataclass
class ReportConfig:
    """
    Configuration for report generation.

    Parameters
    ----------
    include_timings : bool, optional
        Include the stage timing table, by default True.
    include_loss : bool, optional
        Include the training loss table when the report carries one,
        by default True.
    max_table_rows : int, optional
        Maximum rows in series tables before abbreviation, by default 20.
    """

    include_timings: bool = True
    include_loss: bool = True
    max_table_rows: int = 20


class ExperimentReportGenerator:
    """
    Render an :class:`ExperimentReport` as Markdown.

    Parameters
    ----------
    config : ReportConfig, optional
        Report configuration. If not provided, uses defaults.

    Examples
    --------
    >>> from manifoldlab.experiments import ExperimentReport
    >>> report = ExperimentReport("universality", {"seed": 7})
    >>> report.add_target("network_hausdorff", 0.01, "<", 0.05)  # doctest: +ELLIPSIS
    TargetCheck(...)
    >>> text = ExperimentReportGenerator().generate(report)
    >>> "PASSED" in text
    True
    """

    def __init__(self, config: Optional[ReportConfig] = None) -> None:
        self.config = config or ReportConfig()

    def generate(
        self,
        report: ExperimentReport,
        output_path: Optional[Union[str, Path]] = None,
    ) -> str:
        """
        Generate the Markdown summary.

        Parameters
        ----------
        report : ExperimentReport
            Finished report.
        output_path : str or Path, optional
            Where to save the Markdown file.

        Returns
        -------
        str
            Markdown content.
        """
        sections = [
            self._build_header(report),
            self._build_config_section(report.config),
            SECTION_HEADERS["targets"] + "\n\n" + TableGenerator.targets_table(report.targets),
            SECTION_HEADERS["metrics"] + "\n\n" + TableGenerator.metrics_table(report.metrics),
        ]
        if self.config.include_timings and report.timings:
            sections.append(self._build_timings_section(report.timings))
        history = report.details.get("loss_history")
        if self.config.include_loss and history:
            sections.append(
                SECTION_HEADERS["loss"]
                + "\n\n"
                + TableGenerator.series_table(history, max_rows=self.config.max_table_rows)
            )
        if report.artifacts:
            sections.append(
                SECTION_HEADERS["artifacts"]
                + "\n\n"
                + "\n".join(f"- `{name}`" for name in sorted(report.artifacts))
            )
        content = "\n\n".join(sections) + "\n"

        if output_path is not None:
            self._save(content, output_path)

        return content

    def _build_header(self, report: ExperimentReport) -> str:
        """Build report header."""
        return REPORT_HEADER_TEMPLATE.format(
            experiment=report.experiment,
            version=manifoldlab.__version__,
            seed=report.config.get("seed", "-"),
            status="PASSED" if report.passed else "FAILED",
            met=sum(t.passed for t in report.targets),
            total=len(report.targets),
        )

    def _build_config_section(self, config: dict[str, Any]) -> str:
        """Build configuration table."""
        rows: List[Tuple[str, str, str]] = []
        for key in sorted(config):
            value = config[key]
            if isinstance(value, dict):
                for sub in sorted(value):
                    rows.append((f"{key}.{sub}", format_value(value[sub]), "-"))
            else:
                rows.append((key, format_value(value), PARAMETER_UNITS.get(key, "-")))
        return SECTION_HEADERS["config"] + "\n\n" + TableGenerator.parameters_table(rows)

    def _build_timings_section(self, timings: dict[str, float]) -> str:
        """Build stage timing table."""
        rows = [(name, f"{seconds:.3f}", "s") for name, seconds in timings.items()]
        return SECTION_HEADERS["timings"] + "\n\n" + TableGenerator.parameters_table(
            rows, headers=("Stage", "Time", "Unit")
        )

    def _save(self, content: str, path: Union[str, Path]) -> None:
        """Save report to file."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")


def write_markdown_report(
    report: ExperimentReport,
    path: Union[str, Path],
    config: Optional[ReportConfig] = None,
) -> Path:
    """Write ``report`` as Markdown to ``path``."""
    ExperimentReportGenerator(config).generate(report, output_path=path)
    return Path(path)
