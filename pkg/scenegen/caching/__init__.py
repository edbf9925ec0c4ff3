from .calibration import (
    CalibrationTrace,
    GroupFit,
    Grouping,
    SweepRow,
    TraceEntry,
    calibrate,
    fit_all_groupings,
    fit_grouping,
    select_threshold,
)
from .decisions import Decision, cached_forward, relative_distance, replay_decisions, should_reuse
from .modulation import Modulation, modulated_input
from .policy import Branch, BranchMode, CachePolicy, load_policy, save_policy
from .state import BranchState, CacheState

__all__ = [
    "Branch",
    "BranchMode",
    "BranchState",
    "CachePolicy",
    "CacheState",
    "CalibrationTrace",
    "Decision",
    "GroupFit",
    "Grouping",
    "Modulation",
    "SweepRow",
    "TraceEntry",
    "cached_forward",
    "calibrate",
    "fit_all_groupings",
    "fit_grouping",
    "load_policy",
    "modulated_input",
    "relative_distance",
    "replay_decisions",
    "save_policy",
    "select_threshold",
    "should_reuse",
]
