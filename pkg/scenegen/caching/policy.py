from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Iterable, Optional

from scenegen.errors import ConfigurationError
from scenegen.numerics import Polynomial
from scenegen.storage.files import PathLike, read_json, write_json


class Branch(str, Enum):
    CONDITION = "condition"
    UNCONDITION = "uncondition"


class BranchMode(str, Enum):
    ALL = "all"
    CONDITION_ONLY = "condition_only"
    UNCONDITION_ONLY = "uncondition_only"
    DISABLED = "disabled"

    def governs(self, branch: Branch) -> bool:
        if self is BranchMode.ALL:
            return True
        if self is BranchMode.CONDITION_ONLY:
            return branch is Branch.CONDITION
        if self is BranchMode.UNCONDITION_ONLY:
            return branch is Branch.UNCONDITION
        return False


@dataclass(frozen=True)
class CachePolicy:
    """Step-cache configuration for one sampling run of `total_steps` steps.

    The first and last steps are always forced to compute; `force_compute_steps`
    holds the full forced set after construction.
    """

    branch_mode: BranchMode = BranchMode.CONDITION_ONLY
    threshold: float = 0.08
    rescale: Polynomial = field(default_factory=Polynomial.identity)
    total_steps: int = 1
    force_compute_steps: FrozenSet[int] = frozenset()

    def __post_init__(self):
        try:
            object.__setattr__(self, "branch_mode", BranchMode(self.branch_mode))
        except ValueError:
            raise ConfigurationError(f"unknown branch mode {self.branch_mode!r}", key="branch_mode")
        if not self.threshold >= 0:
            raise ConfigurationError("threshold must be >= 0", key="threshold")
        if self.total_steps < 0:
            raise ConfigurationError("total_steps must be >= 0", key="total_steps")
        forced = set(self.force_compute_steps)
        if self.total_steps > 0:
            forced |= {0, self.total_steps - 1}
        bad = sorted(s for s in forced if not 0 <= s < max(self.total_steps, 1))
        if bad:
            raise ConfigurationError(f"forced steps {bad} outside [0, {self.total_steps})", key="force_compute_steps")
        object.__setattr__(self, "force_compute_steps", frozenset(forced))

    @classmethod
    def disabled(cls, total_steps: int = 1) -> "CachePolicy":
        return cls(branch_mode=BranchMode.DISABLED, threshold=0.0, total_steps=total_steps)

    def governs(self, branch: Branch) -> bool:
        return self.branch_mode.governs(branch)

    def for_steps(self, total_steps: int, extra_forced: Optional[Iterable[int]] = None) -> "CachePolicy":
        """Same policy re-anchored to a run of `total_steps` steps."""
        old_anchors = {0, self.total_steps - 1} if self.total_steps > 0 else set()
        kept = (set(self.force_compute_steps) - old_anchors) | set(extra_forced or ())
        return CachePolicy(
            branch_mode=self.branch_mode,
            threshold=self.threshold,
            rescale=self.rescale,
            total_steps=total_steps,
            force_compute_steps=frozenset(s for s in kept if s < total_steps),
        )

    def with_threshold(self, threshold: float) -> "CachePolicy":
        return CachePolicy(self.branch_mode, threshold, self.rescale, self.total_steps, self.force_compute_steps)

    def to_record(self) -> dict:
        return {
            "branch_mode": self.branch_mode.value,
            "threshold": self.threshold,
            "rescale": self.rescale.to_list(),
            "total_steps": self.total_steps,
            "force_compute_steps": sorted(self.force_compute_steps),
        }

    @classmethod
    def from_record(cls, record: dict) -> "CachePolicy":
        try:
            return cls(
                branch_mode=record["branch_mode"],
                threshold=float(record["threshold"]),
                rescale=Polynomial(tuple(float(c) for c in record.get("rescale", [0.0, 1.0]))),
                total_steps=int(record.get("total_steps", 1)),
                force_compute_steps=frozenset(int(s) for s in record.get("force_compute_steps", ())),
            )
        except KeyError as exc:
            raise ConfigurationError("missing policy field", key=str(exc.args[0])) from exc


def save_policy(policy: CachePolicy, path: PathLike, **extra) -> None:
    """Write the policy as JSON; `extra` keys (e.g. per-grouping fits) ride along."""
    write_json(path, {**extra, "policy": policy.to_record()})


def load_policy(path: PathLike) -> CachePolicy:
    payload = read_json(path)
    if not isinstance(payload, dict) or "policy" not in payload:
        raise ConfigurationError("policy file has no 'policy' section", key="cache.policy_file")
    return CachePolicy.from_record(payload["policy"])
