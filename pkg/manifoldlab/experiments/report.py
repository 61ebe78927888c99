"""Structured record of an experiment run."""

from __future__ import annotations

import json
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Union

from manifoldlab.exceptions import CalculationError, InvalidParameterError

REPORT_FILE = "report.json"

_OPERATORS: dict[str, Callable[[float, float], bool]] = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
}


@dataclass(frozen=True)
class TargetCheck:
    """
    One pass/fail comparison ``value op threshold``.

    Examples
    --------
    >>> TargetCheck.evaluate("hausdorff", 0.03, "<", 0.05).passed
    True
    """

    name: str
    value: float
    op: str
    threshold: float
    passed: bool

    @classmethod
    def evaluate(cls, name: str, value: float, op: str, threshold: float) -> "TargetCheck":
        """Compare and record."""
        if op not in _OPERATORS:
            raise InvalidParameterError(
                f"op must be one of {', '.join(_OPERATORS)}, got {op!r}"
            )
        value = float(value)
        threshold = float(threshold)
        passed = math.isfinite(value) and _OPERATORS[op](value, threshold)
        return cls(name=name, value=value, op=op, threshold=threshold, passed=bool(passed))

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "value": self.value,
            "op": self.op,
            "threshold": self.threshold,
            "passed": self.passed,
        }


@dataclass
class ExperimentReport:
    """
    Result of one experiment run.

    Attributes
    ----------
    experiment : str
        Experiment name.
    config : dict
        Normalised input configuration.
    metrics : dict
        Flat mapping of named numeric results.
    targets : list of TargetCheck
        Configured pass/fail comparisons.
    timings : dict
        Wall-clock seconds per stage. Excluded from reproducibility
        comparisons.
    artifacts : list of str
        Files written next to the report, relative to the output directory.
    details : dict
        Structured per-stage records (verdict lists, per-class values).
    """

    experiment: str
    config: dict[str, Any]
    metrics: dict[str, float] = field(default_factory=dict)
    targets: list[TargetCheck] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """True when every target passed."""
        return all(t.passed for t in self.targets)

    def add_metric(self, name: str, value: float) -> float:
        """Record a metric; returns it as float."""
        self.metrics[name] = float(value)
        return self.metrics[name]

    def add_target(self, name: str, value: float, op: str, threshold: float) -> TargetCheck:
        """Record a metric and a target on it."""
        self.add_metric(name, value)
        check = TargetCheck.evaluate(name, value, op, threshold)
        self.targets.append(check)
        return check

    def failed_targets(self) -> list[TargetCheck]:
        return [t for t in self.targets if not t.passed]

    def to_dict(self) -> dict[str, Any]:
        """
        Plain mapping.

        Raises
        ------
        CalculationError
            If any metric or timing is not finite.
        """
        bad = [k for k, v in {**self.metrics, **self.timings}.items() if not math.isfinite(v)]
        if bad:
            raise CalculationError(f"non-finite report values: {', '.join(sorted(bad))}")
        return {
            "experiment": self.experiment,
            "passed": self.passed,
            "config": self.config,
            "metrics": dict(sorted(self.metrics.items())),
            "targets": [t.to_dict() for t in self.targets],
            "timings": dict(sorted(self.timings.items())),
            "artifacts": sorted(self.artifacts),
            "details": self.details,
        }

    def to_json(self) -> str:
        """UTF-8 JSON with stable key order."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)

    def write(self, out_dir: Union[str, Path]) -> Path:
        """Write ``report.json`` into ``out_dir``."""
        path = Path(out_dir) / REPORT_FILE
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        return path

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentReport":
        """Rebuild a report from :meth:`to_dict` output."""
        return cls(
            experiment=data["experiment"],
            config=data["config"],
            metrics=dict(data.get("metrics", {})),
            targets=[TargetCheck(**t) for t in data.get("targets", [])],
            timings=dict(data.get("timings", {})),
            artifacts=list(data.get("artifacts", [])),
            details=dict(data.get("details", {})),
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ExperimentReport":
        """Read a ``report.json``."""
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
