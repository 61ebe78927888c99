"""Markdown templates for experiment reports."""

REPORT_HEADER_TEMPLATE = """# Experiment report: {experiment}

*Generated by manifoldlab v{version}, master seed {seed}.*

**Status:** {status} ({met}/{total} targets met)"""

SECTION_HEADERS = {
    "config": "## Configuration",
    "targets": "## Targets",
    "metrics": "## Metrics",
    "timings": "## Stage timings",
    "loss": "## Training loss",
    "artifacts": "## Artifacts",
}

PARAMETER_UNITS = {
    "epsilon": "ambient length",
    "delta": "normalised measure",
    "grid_resolution": "points per axis",
    "sample_count": "points",
    "trials": "redraws",
    "seed": "-",
}
