"""Shared plumbing of every workflow: stage timing, error tagging, report and metrics output."""
import logging
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

from scenegen.config import PipelineConfig
from scenegen.errors import StageError
from scenegen.metrics import RunReport, emit_report
from scenegen.utils.monitoring import MetricsCollector

logger = logging.getLogger(__name__)

FRAMES_DIRNAME = "frames"
SCENES_DIRNAME = "scenes"
REPORT_FILENAME = "report.json"


class Workflow:
    """One CLI command. Subclasses implement `run()` and return the finished report.

    Workflows composed into a pipeline share a single report and collector, so
    every stage lands in one merged document.
    """

    command = "workflow"

    def __init__(self, config: PipelineConfig, collector: Optional[MetricsCollector] = None,
                 report: Optional[RunReport] = None):
        self.config = config
        self.collector = collector or MetricsCollector()
        self.report = report or RunReport(command=self.command, config=config.echo())

    @property
    def output_dir(self) -> Path:
        return self.config.output_path

    @property
    def report_path(self) -> Path:
        return self.output_dir / REPORT_FILENAME

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        logger.info("stage=%s status=started", name)
        start = time.perf_counter()
        try:
            yield
        except StageError:
            raise
        except Exception as exc:
            logger.error("stage=%s status=failed error=%s", name, exc)
            raise StageError(name, exc) from exc
        seconds = time.perf_counter() - start
        self.report.record_timing(name, seconds)
        self.collector.observe_stage(name, seconds)
        logger.info("stage=%s status=done seconds=%.2f", name, seconds)

    def finish(self) -> RunReport:
        emit_report(self.report, self.report_path)
        self.collector.write(self.output_dir)
        logger.info("report written to %s", self.report_path)
        return self.report

    def run(self) -> RunReport:
        raise NotImplementedError
