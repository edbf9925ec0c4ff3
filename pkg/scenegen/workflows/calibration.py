"""Calibrate the step-cache rescale polynomial and write it to a policy file."""
import logging
from pathlib import Path
from typing import Optional

from scenegen.caching import BranchMode, CachePolicy, CalibrationTrace, Grouping, fit_all_groupings, save_policy, select_threshold
from scenegen.config import PipelineConfig
from scenegen.diffusion import ToyDiT, build_conditioning, record_trace, sweep_thresholds
from scenegen.metrics import RunReport
from scenegen.storage.files import PathLike, read_json, write_json

from .base import Workflow

logger = logging.getLogger(__name__)

POLICY_FILENAME = "policy.json"
TRACE_FILENAME = "calibration_trace.json"

# grouping whose fit drives the policy of each branch mode
_GROUPING_FOR_MODE = {
    BranchMode.CONDITION_ONLY: Grouping.CONDITION,
    BranchMode.UNCONDITION_ONLY: Grouping.UNCONDITION,
    BranchMode.ALL: Grouping.ALL,
    BranchMode.DISABLED: Grouping.ALL,
}


class CalibrationWorkflow(Workflow):
    """Record (or reload) a trace with caching off, fit all groupings, optionally sweep thresholds."""

    command = "calibrate"

    def __init__(self, config: PipelineConfig, trace_file: Optional[PathLike] = None, **kwargs):
        super().__init__(config, **kwargs)
        self.trace_file = Path(trace_file) if trace_file else None

    @property
    def policy_path(self) -> Path:
        return self.output_dir / POLICY_FILENAME

    @property
    def trace_path(self) -> Path:
        return self.output_dir / TRACE_FILENAME

    def calibrate(self) -> CachePolicy:
        cfg = self.config
        dit = cfg.dit_config
        section = cfg.cache
        with self.stage("calibrate"):
            model = ToyDiT(dit)
            cond = build_conditioning(cfg.prompt, cfg.boxes, cfg.grid, dim=dit.cond_dim)
            if self.trace_file is not None:
                trace = CalibrationTrace.from_records(read_json(self.trace_file))
            else:
                trace = record_trace(model, cond)
            fits = fit_all_groupings(trace, section.degree)
            chosen = fits[_GROUPING_FOR_MODE[section.branch_mode]]
            policy = CachePolicy(section.branch_mode, section.threshold, chosen.polynomial, dit.steps,
                                 frozenset(section.force_compute_steps))

            sweep_records = []
            if section.sweep:
                rows = sweep_thresholds(model, cond, section.sweep, policy)
                best = select_threshold(rows, max_drift=section.max_drift, min_reuse=section.min_reuse)
                policy = policy.with_threshold(best.threshold)
                sweep_records = [
                    {"threshold": r.threshold, "computed_steps": r.computed_steps, "reused_steps": r.reused_steps,
                     "reuse_fraction": r.reuse_fraction, "drift": r.drift, "seconds": r.seconds}
                    for r in rows
                ]

            fit_records = {g.value: fit.to_record() for g, fit in fits.items()}
            write_json(self.trace_path, trace.to_records())
            save_policy(policy, self.policy_path, fits=fit_records, sweep=sweep_records)

        self.report.sections["calibrate"] = {
            "policy": policy.to_record(),
            "policy_file": self.policy_path.name,
            "trace_file": self.trace_path.name,
            "fits": fit_records,
            "sweep": sweep_records,
        }
        return policy

    def run(self) -> RunReport:
        self.calibrate()
        return self.finish()
