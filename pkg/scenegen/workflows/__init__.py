from .base import FRAMES_DIRNAME, REPORT_FILENAME, SCENES_DIRNAME, Workflow
from .calibration import POLICY_FILENAME, TRACE_FILENAME, CalibrationWorkflow
from .generation import GenerationWorkflow
from .pipeline import PipelineWorkflow
from .profiling import ProfilingWorkflow
from .reconstruction import ReconstructionWorkflow

__all__ = [
    "CalibrationWorkflow",
    "FRAMES_DIRNAME",
    "GenerationWorkflow",
    "POLICY_FILENAME",
    "PipelineWorkflow",
    "ProfilingWorkflow",
    "REPORT_FILENAME",
    "ReconstructionWorkflow",
    "SCENES_DIRNAME",
    "TRACE_FILENAME",
    "Workflow",
]
