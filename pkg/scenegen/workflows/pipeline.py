"""Generate, reconstruct and evaluate in one run with a single merged report."""
import logging
import time
from typing import Optional

from scenegen.config import PipelineConfig
from scenegen.errors import StorageError
from scenegen.metrics import RunReport
from scenegen.utils.monitoring import MetricsCollector

from .base import Workflow
from .generation import GenerationWorkflow
from .reconstruction import ReconstructionWorkflow

logger = logging.getLogger(__name__)


class PipelineWorkflow(Workflow):
    """Stages run in order and the first failure aborts the run.

    With `reuse_frames` a complete frame directory from an earlier run stands
    in for the generation stage.
    """

    command = "pipeline"

    def __init__(self, config: PipelineConfig, reuse_frames: bool = False,
                 collector: Optional[MetricsCollector] = None):
        super().__init__(config, collector=collector)
        self.reuse_frames = reuse_frames
        shared = {"collector": self.collector, "report": self.report}
        self.generation = GenerationWorkflow(config, **shared)
        self.reconstruction = ReconstructionWorkflow(config, **shared)

    def _frames_available(self) -> bool:
        try:
            self.reconstruction.load_frames()
        except StorageError:
            return False
        return True

    def run(self) -> RunReport:
        start = time.perf_counter()
        if self.reuse_frames and self._frames_available():
            logger.info("reusing frames in %s", self.reconstruction.frames_dir)
            self.report.sections["generate"] = {"source": self.config.frames_source, "reused": True}
        else:
            self.generation.generate()
        frames, _ = self.reconstruction.reconstruct()
        self.reconstruction.evaluate(frames)
        self.report.record_timing("end_to_end", time.perf_counter() - start)
        return self.finish()
