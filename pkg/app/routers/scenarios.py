import argparse
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from app.config import settings
from app.models.report import ScenarioReport
from app.models.scenario import ScenarioConfig, SweepConfig
from app.services.scenario_service import SUMMARY_COLUMNS, scenario_service
from utils.file_utils import ConfigFileError, format_table, list_config_files, load_json, write_report
from workers.processors import QUANTUM_COLUMNS

logger = logging.getLogger(__name__)

CSV_HELP = f"""
CSV columns:
  quantum scenarios  {", ".join(QUANTUM_COLUMNS)}
  identities         cutoff, one residual column per identity
  classical          k, kc_over_omega, nu_plus, nu_minus, rabi, max_psi2
  coupling           k, one |S(k, Omega)| column per Omega (Omega=<value>)
"""


def load_configs(path: Path) -> List[ScenarioConfig]:
    """
    Parse a config file holding either one ScenarioConfig or a SweepConfig

    Raises:
        ConfigFileError: unreadable file
        pydantic.ValidationError: invalid fields or unknown keys
    """
    data = load_json(path)
    if "scenarios" in data:
        return SweepConfig.model_validate(data).expand()
    return [ScenarioConfig.model_validate(data)]


def load_config_directory(directory: Path) -> List[ScenarioConfig]:
    """
    Parse every config in a directory, sorted by file name

    Raises:
        ConfigFileError: unreadable file, or two configs resolving to the same output label
        pydantic.ValidationError: invalid fields or unknown keys
    """
    configs: List[ScenarioConfig] = []
    origins: Dict[str, str] = {}
    for path in list_config_files(directory):
        expanded = load_configs(path)
        logger.info(f"{path.name}: {len(expanded)} scenario(s)")
        for config in expanded:
            label = config.resolved_label
            if label in origins:
                raise ConfigFileError(f"Label '{label}' from {path.name} already produced by {origins[label]}")
            origins[label] = path.name
        configs.extend(expanded)
    return configs


def save_report(report: ScenarioReport, output_dir: Path, csv_path: Optional[Path] = None) -> Tuple[Path, Optional[Path]]:
    return write_report(report.label, report.persisted(), report.columns, report.time_series, output_dir, csv_path)


def run_command(args: argparse.Namespace) -> int:
    """
    Run one scenario config and write <label>.json and <label>.csv

    Exit code 0 iff every assertion passed.
    """
    config = ScenarioConfig.model_validate(load_json(args.config))
    report = scenario_service.run_scenario(config)
    output_dir = args.out or settings.output_path
    json_path, csv_path = save_report(report, output_dir, args.csv)
    print(format_table(SUMMARY_COLUMNS, scenario_service.summary_rows([report])))
    if report.error:
        print(report.error)
    logger.info(f"Report written to {json_path}" + (f", time series to {csv_path}" if csv_path else ""))
    return 0 if report.passed else 1


def sweep_command(args: argparse.Namespace) -> int:
    """
    Run every config in a directory (sorted by file name) and print the summary table

    Exit code 0 iff every scenario passed.
    """
    reports = scenario_service.sweep(load_config_directory(args.directory))
    output_dir = args.out or settings.output_path
    for report in reports:
        save_report(report, output_dir)
    print(format_table(SUMMARY_COLUMNS, scenario_service.summary_rows(reports)))
    return 0 if all(r.passed for r in reports) else 1


def register(subparsers) -> None:
    """Add the run and sweep subcommands"""
    run_parser = subparsers.add_parser(
        "run",
        help="Run one scenario config",
        description="Run one scenario from a JSON config and write its report and time series.",
        epilog=CSV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    run_parser.add_argument("config", type=Path, help="Scenario config (JSON)")
    run_parser.add_argument("--out", type=Path, default=None, help="Output directory (default: RINDLER_SIM_OUTPUT_DIR)")
    run_parser.add_argument("--csv", type=Path, default=None, help="Time-series CSV path ('-' for stdout)")
    run_parser.set_defaults(func=run_command)

    sweep_parser = subparsers.add_parser(
        "sweep",
        help="Run every config in a directory",
        description="Run every *.json scenario or sweep config in a directory, concurrently.",
        epilog=CSV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sweep_parser.add_argument("directory", type=Path, help="Directory of JSON configs")
    sweep_parser.add_argument("--out", type=Path, default=None, help="Output directory (default: RINDLER_SIM_OUTPUT_DIR)")
    sweep_parser.set_defaults(func=sweep_command)
