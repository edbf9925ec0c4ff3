from dataclasses import dataclass, field
from typing import Dict, Optional

from scenegen.numerics import Tensor

from .policy import Branch


@dataclass
class BranchState:
    accumulated_distance: float = 0.0
    cached_residual: Optional[Tensor] = None
    last_modulated_input: Optional[Tensor] = None
    computed_steps: int = 0
    reused_steps: int = 0

    @property
    def steps(self) -> int:
        return self.computed_steps + self.reused_steps


@dataclass
class CacheState:
    """Mutable per-run cache bookkeeping, one independent accumulator per branch."""

    branches: Dict[Branch, BranchState] = field(
        default_factory=lambda: {branch: BranchState() for branch in Branch}
    )

    def __getitem__(self, branch: Branch) -> BranchState:
        return self.branches[Branch(branch)]

    def counters(self) -> Dict[str, Dict[str, int]]:
        return {
            branch.value: {"computed_steps": s.computed_steps, "reused_steps": s.reused_steps}
            for branch, s in self.branches.items()
        }
