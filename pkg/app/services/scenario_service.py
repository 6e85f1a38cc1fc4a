import time
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

from app.config import settings
from app.models.report import ScenarioReport, ScenarioStatus
from app.models.scenario import ScenarioConfig, ScenarioType
from utils.fock_utils import DimensionBudgetError
from workers.processors import PROCESSORS

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["label", "scenario", "status", "passed", "failed", "leakage_budget", "wall_clock"]


class ScenarioService:
    """Service for running scenarios and sweeps"""

    def __init__(self, processors: Optional[Dict[ScenarioType, Callable[[ScenarioConfig], ScenarioReport]]] = None):
        self.processors = processors or PROCESSORS

    def run_scenario(self, config: ScenarioConfig) -> ScenarioReport:
        """
        Run one scenario

        Args:
            config: Validated scenario configuration

        Returns:
            ScenarioReport; a register above the dimension budget yields a REFUSED
            report carrying the required dimension

        Raises:
            Any kernel error other than a dimension refusal
        """
        label = config.resolved_label
        processor = self.processors[config.scenario]
        start_time = time.perf_counter()
        try:
            report = processor(config)
        except DimensionBudgetError as e:
            logger.warning(f"[{label}] Refused: {e}")
            report = ScenarioReport(
                label=label,
                scenario=config.scenario.value,
                status=ScenarioStatus.REFUSED,
                parameters={"gamma": config.squeeze.gamma, "g": config.g},
                required_dimension=e.required,
                error=str(e),
            )
        report.wall_clock = time.perf_counter() - start_time
        logger.info(f"[{label}] Finished in {report.wall_clock:.2f}s with status {report.status.value}")
        return report

    def _run_guarded(self, config: ScenarioConfig) -> ScenarioReport:
        try:
            return self.run_scenario(config)
        except Exception as e:
            label = config.resolved_label
            logger.error(f"[{label}] Scenario failed with an error: {e}", exc_info=True)
            return ScenarioReport(
                label=label,
                scenario=config.scenario.value,
                status=ScenarioStatus.ERROR,
                parameters={"g": config.g},
                error=f"{type(e).__name__}: {e}",
            )

    def sweep(self, configs: Sequence[ScenarioConfig], max_workers: Optional[int] = None) -> List[ScenarioReport]:
        """
        Run independent scenarios concurrently

        Args:
            configs: Scenario configurations
            max_workers: Worker cap (default: RINDLER_SIM_THREADS)

        Returns:
            One report per config, in input order; a failing run becomes an ERROR report
            and does not stop its siblings
        """
        if not configs:
            return []
        workers = min(max_workers or settings.worker_count, len(configs))
        logger.info(f"Sweeping {len(configs)} scenarios on {workers} workers")
        with ThreadPoolExecutor(max_workers=workers) as executor:
            reports = list(executor.map(self._run_guarded, configs))
        failed = sum(1 for r in reports if not r.passed)
        logger.info(f"Sweep done: {len(reports) - failed} passed, {failed} not passed")
        return reports

    @staticmethod
    def summary_rows(reports: Sequence[ScenarioReport]) -> List[list]:
        """Summary table rows in SUMMARY_COLUMNS order"""
        rows = []
        for report in reports:
            passed = sum(1 for a in report.assertions if a.passed)
            rows.append([
                report.label,
                report.scenario,
                report.status.value,
                passed,
                len(report.assertions) - passed,
                f"{report.leakage_budget:.3e}",
                f"{report.wall_clock:.2f}" if report.wall_clock is not None else "",
            ])
        return rows


scenario_service = ScenarioService()
