"""Markdown table formatters for experiment reports."""

from typing import Any, List, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike

from manifoldlab.experiments.report import TargetCheck


def format_value(value: Any, digits: int = 6) -> str:
    """
    Compact text for a table cell.

    Examples
    --------
    >>> format_value(0.000012345)
    '1.2345e-05'
    >>> format_value(3.0)
    '3'
    >>> format_value(True)
    'yes'
    """
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if np.isfinite(v) and v.is_integer() and abs(v) < 1e15:
            return str(int(v))
        return f"{v:.{digits}g}"
    if isinstance(value, (list, tuple)):
        return ", ".join(format_value(v, digits) for v in value)
    return str(value)


class TableGenerator:
    """
    Generate formatted Markdown tables.

    Examples
    --------
    >>> print(TableGenerator.parameters_table([("seed", "7", "-")]))
    | Parameter | Value | Unit |
    |:---------|--------:|:---------:|
    | seed | 7 | - |
    """

    @staticmethod
    def parameters_table(
        data: List[Tuple[str, str, str]],
        headers: Tuple[str, str, str] = ("Parameter", "Value", "Unit"),
    ) -> str:
        """
        Generate a parameters table with aligned columns.

        Parameters
        ----------
        data : list of tuple
            List of (parameter, value, unit) tuples.
        headers : tuple of str, optional
            Column headers.

        Returns
        -------
        str
            Formatted Markdown table.
        """
        lines = [
            f"| {headers[0]} | {headers[1]} | {headers[2]} |",
            "|:---------|--------:|:---------:|",
        ]
        for param, value, unit in data:
            lines.append(f"| {param} | {value} | {unit} |")
        return "\n".join(lines)

    @staticmethod
    def metrics_table(metrics: dict) -> str:
        """Two-column table of named metrics in key order."""
        lines = ["| Metric | Value |", "|:---------|--------:|"]
        for name in sorted(metrics):
            lines.append(f"| {name} | {format_value(metrics[name])} |")
        return "\n".join(lines)

    @staticmethod
    def targets_table(targets: Sequence[TargetCheck]) -> str:
        """
        Pass/fail table of target checks.

        Examples
        --------
        >>> t = TargetCheck.evaluate("hausdorff", 0.5, "<", 0.05)
        >>> print(TableGenerator.targets_table([t]).splitlines()[-1])
        | hausdorff | 0.5 | < 0.05 | FAIL |
        """
        lines = [
            "| Target | Value | Required | Result |",
            "|:---------|--------:|:---------:|:------:|",
        ]
        for t in targets:
            status = "pass" if t.passed else "FAIL"
            lines.append(
                f"| {t.name} | {format_value(t.value)} | {t.op} {format_value(t.threshold)} "
                f"| {status} |"
            )
        return "\n".join(lines)

    @staticmethod
    def series_table(
        values: ArrayLike,
        index_header: str = "Epoch",
        value_header: str = "MSE",
        max_rows: int = 20,
        value_format: str = ".4e",
    ) -> str:
        """
        Generate an indexed series table, abbreviated if too long.

        Parameters
        ----------
        values : array_like
            Series values; row ``i`` is labelled ``i``.
        index_header : str, optional
            Header for the index column.
        value_header : str, optional
            Header for the value column.
        max_rows : int, optional
            Maximum rows before abbreviation.
        value_format : str, optional
            Format string for values.

        Returns
        -------
        str
            Formatted Markdown table.
        """
        series = np.asarray(values, dtype=np.float64).ravel()
        n = series.size
        lines = [
            f"| {index_header} | {value_header} |",
            "|--------:|--------:|",
        ]

        if n <= max_rows:
            for i, v in enumerate(series):
                lines.append(f"| {i} | {v:{value_format}} |")
        else:
            # Show first rows, ..., last rows
            head_count = max_rows // 2
            tail_count = max_rows - head_count - 1

            for i in range(head_count):
                lines.append(f"| {i} | {series[i]:{value_format}} |")

            lines.append("| ... | ... |")

            for i in range(n - tail_count, n):
                lines.append(f"| {i} | {series[i]:{value_format}} |")

            lines.append(f"\n*Table abbreviated ({n} rows)*")

        return "\n".join(lines)
