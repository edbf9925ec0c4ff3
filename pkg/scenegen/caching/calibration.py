"""Calibration traces, rescale-polynomial fitting and threshold selection."""
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence

from scenegen.errors import CalibrationError, DimensionError, SingularFitError
from scenegen.numerics import Polynomial, polyfit

from .policy import Branch

logger = logging.getLogger(__name__)


class Grouping(str, Enum):
    ALL = "all"
    CONDITION = "condition"
    UNCONDITION = "uncondition"


@dataclass(frozen=True)
class TraceEntry:
    step: int
    branch: Branch
    input_distance: float
    output_distance: float

    def __post_init__(self):
        if self.input_distance < 0 or self.output_distance < 0:
            raise CalibrationError(f"negative distance in trace entry at step {self.step}")


@dataclass
class CalibrationTrace:
    entries: List[TraceEntry] = field(default_factory=list)

    def select(self, grouping: Grouping) -> List[TraceEntry]:
        grouping = Grouping(grouping)
        if grouping is Grouping.ALL:
            return list(self.entries)
        return [e for e in self.entries if e.branch.value == grouping.value]

    def input_distances(self, branch: Branch) -> List[Optional[float]]:
        """Per-step distance sequence of one branch, None at step 0, for decision replay."""
        picked = sorted((e for e in self.entries if e.branch is Branch(branch)), key=lambda e: e.step)
        return [None] + [e.input_distance for e in picked]

    def to_records(self) -> List[Dict]:
        return [dict(asdict(e), branch=e.branch.value) for e in self.entries]

    @classmethod
    def from_records(cls, records: Sequence[Dict]) -> "CalibrationTrace":
        return cls([
            TraceEntry(int(r["step"]), Branch(r["branch"]), float(r["input_distance"]), float(r["output_distance"]))
            for r in records
        ])


@dataclass(frozen=True)
class GroupFit:
    grouping: Grouping
    polynomial: Polynomial
    residual: float
    pairs: int

    def to_record(self) -> Dict:
        return {
            "grouping": self.grouping.value,
            "coefficients": self.polynomial.to_list(),
            "residual": self.residual,
            "pairs": self.pairs,
        }


def calibrate(trace: CalibrationTrace, degree: int = 4, branch: Grouping = Grouping.CONDITION) -> Polynomial:
    """Fit output_distance as a polynomial of input_distance over one grouping."""
    return fit_grouping(trace, degree, branch).polynomial


def fit_grouping(trace: CalibrationTrace, degree: int, grouping: Grouping) -> GroupFit:
    grouping = Grouping(grouping)
    entries = trace.select(grouping)
    if len(entries) < degree + 1:
        raise CalibrationError(
            f"{grouping.value}: {len(entries)} step pairs cannot fit degree {degree}; "
            f"record a run with at least {degree + 2} sampling steps"
        )
    xs = [e.input_distance for e in entries]
    ys = [e.output_distance for e in entries]
    try:
        poly = polyfit(xs, ys, degree)
    except (DimensionError, SingularFitError) as exc:
        raise CalibrationError(f"{grouping.value}: {exc}") from exc
    return GroupFit(grouping, poly, poly.residual(xs, ys), len(entries))


def fit_all_groupings(trace: CalibrationTrace, degree: int = 4) -> Dict[Grouping, GroupFit]:
    fits = {g: fit_grouping(trace, degree, g) for g in Grouping}
    for fit in fits.values():
        logger.info("calibration fit %s: residual=%.3e pairs=%d", fit.grouping.value, fit.residual, fit.pairs)
    return fits


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    computed_steps: int
    reused_steps: int
    drift: float
    seconds: float

    @property
    def reuse_fraction(self) -> float:
        total = self.computed_steps + self.reused_steps
        return self.reused_steps / total if total else 0.0


def select_threshold(rows: Sequence[SweepRow], max_drift: float = 0.05, min_reuse: float = 0.0) -> SweepRow:
    """Row with the largest threshold whose drift stays within `max_drift` and reuse reaches `min_reuse`."""
    admissible = [r for r in rows if r.drift <= max_drift and r.reuse_fraction >= min_reuse]
    if not admissible:
        raise CalibrationError(f"no swept threshold keeps drift <= {max_drift} with reuse >= {min_reuse:.0%}")
    return max(admissible, key=lambda r: r.threshold)
