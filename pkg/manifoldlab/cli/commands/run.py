"""CLI command for running one experiment."""

import argparse

from manifoldlab.experiments import OUTPUT_DIR_ENV, ExperimentConfig, run_experiment

EXIT_PASS = 0
EXIT_TARGET_FAILED = 2


def register_parser(subparsers: argparse._SubParsersAction) -> None:
    """Register the 'run' command parser."""
    parser = subparsers.add_parser(
        "run",
        help="Run an experiment from a JSON config",
        description="Execute one experiment end-to-end and write its report and artifacts.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=f"""
Output directory, first match wins:
  --out DIR, ${OUTPUT_DIR_ENV}, "output_dir" in the config, runs/<experiment>

Examples:
  manifoldlab run universality.json
  manifoldlab run embedding.json --out runs/embedding -q
""",
    )

    parser.add_argument(
        "config",
        metavar="CONFIG",
        help="Path to the experiment config (JSON)",
    )
    parser.add_argument(
        "--out",
        metavar="DIR",
        default=None,
        help="Output directory for report.json, CSVs, plots and checkpoints",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="Log DEBUG messages",
    )
    verbosity.add_argument(
        "-q",
        "--quiet",
        action="store_true",
        help="Log errors only",
    )

    parser.set_defaults(func=_run_experiment)


def _run_experiment(args: argparse.Namespace) -> int:
    """Execute an experiment and print its summary."""
    config = ExperimentConfig.load(args.config)
    report = run_experiment(config, args.out)
    out_dir = config.resolve_output_dir(args.out)

    met = sum(t.passed for t in report.targets)
    print(f"Experiment: {report.experiment}")
    print(f"{'─' * 56}")
    for t in report.targets:
        status = "pass" if t.passed else "FAIL"
        print(f"  {t.name:<32} {t.value:>11.4g} {t.op:>2} {t.threshold:<8.4g} {status}")
    print(f"{'─' * 56}")
    print(f"  {met}/{len(report.targets)} targets met")
    print(f"  Report: {out_dir / 'report.json'}")

    return EXIT_PASS if report.passed else EXIT_TARGET_FAILED
