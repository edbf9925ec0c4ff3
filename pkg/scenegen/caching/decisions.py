"""Reuse-or-compute decisions and the cached model evaluation."""
import logging
import math
from enum import Enum
from typing import Callable, List, Optional, Sequence

import numpy as np

from scenegen.errors import DegenerateReferenceError, InvariantViolation
from scenegen.numerics import Tensor, rel_l1

from .policy import Branch, BranchMode, CachePolicy
from .state import CacheState

logger = logging.getLogger(__name__)

# (step, branch, modulated_input, output)
EvaluationListener = Callable[[int, Branch, Tensor, Tensor], None]


class Decision(str, Enum):
    REUSE = "reuse"
    COMPUTE = "compute"


def relative_distance(previous: Tensor, current: Tensor) -> float:
    """rel_l1 with the all-zero reference mapped to 0 (unchanged) or inf (changed)."""
    try:
        return rel_l1(previous, current)
    except DegenerateReferenceError:
        return 0.0 if not np.any(current) else math.inf


def should_reuse(
    state: CacheState,
    policy: CachePolicy,
    input_distance: Optional[float],
    step: int,
    branch: Branch,
) -> Decision:
    bstate = state[branch]
    if (
        not policy.governs(branch)
        or step in policy.force_compute_steps
        or bstate.cached_residual is None
        or input_distance is None
        or not math.isfinite(input_distance)
    ):
        bstate.accumulated_distance = 0.0
        return Decision.COMPUTE

    rescaled = float(policy.rescale(input_distance))
    bstate.accumulated_distance += max(rescaled, 0.0) if math.isfinite(rescaled) else math.inf
    if bstate.accumulated_distance < policy.threshold:
        return Decision.REUSE
    bstate.accumulated_distance = 0.0
    return Decision.COMPUTE


def replay_decisions(input_distances: Sequence[Optional[float]], policy: CachePolicy) -> List[Decision]:
    """Decisions a governed branch would take over a recorded distance sequence.

    `input_distances[s]` is the distance into step s (None for step 0). A
    residual is assumed to exist after the first compute.
    """
    state = CacheState()
    branch = Branch.UNCONDITION if policy.branch_mode is BranchMode.UNCONDITION_ONLY else Branch.CONDITION
    decisions = []
    for step, distance in enumerate(input_distances):
        decision = should_reuse(state, policy, distance, step, branch)
        if decision is Decision.COMPUTE:
            state[branch].cached_residual = np.zeros(1)
        decisions.append(decision)
    return decisions


def cached_forward(
    model,
    z: Tensor,
    t: float,
    cond: Optional[Tensor],
    state: CacheState,
    policy: CachePolicy,
    *,
    step: int,
    branch: Branch,
    listener: Optional[EvaluationListener] = None,
) -> Tensor:
    """One branch evaluation through the step cache.

    The cached residual spans the block stack: hidden_out - modulated_input.
    On compute the head runs on hidden_out itself, so an uncached pass and a
    computed pass are bitwise identical. Branches the policy does not govern
    skip the distance computation entirely.
    """
    bstate = state[branch]
    emb = model.timestep_embedding(t)
    hidden = model.modulated_tokens(z, emb)

    if policy.governs(branch):
        distance = None
        if bstate.last_modulated_input is not None:
            distance = relative_distance(bstate.last_modulated_input, hidden)
        bstate.last_modulated_input = hidden
        decision = should_reuse(state, policy, distance, step, branch)
    else:
        decision = Decision.COMPUTE

    if decision is Decision.REUSE:
        if bstate.cached_residual is None:
            raise InvariantViolation(f"reuse requested at step {step} for {branch.value} with no cached residual")
        out = model.head(hidden + bstate.cached_residual, emb)
        bstate.reused_steps += 1
    else:
        hidden_out = model.run_blocks(hidden, emb, cond, step=step)
        if policy.governs(branch):
            bstate.cached_residual = hidden_out - hidden
        out = model.head(hidden_out, emb)
        bstate.computed_steps += 1

    logger.debug("step=%d branch=%s decision=%s acc=%.4g", step, branch.value, decision.value,
                  bstate.accumulated_distance)
    if listener is not None:
        listener(step, branch, hidden, out)
    return out
