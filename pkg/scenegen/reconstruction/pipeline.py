"""Triplet reconstruction, the sequence loop and held-out frame evaluation."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from tqdm import tqdm

from scenegen.errors import BoundaryError, ConfigurationError, InvariantViolation
from scenegen.gaussians import FrameGaussians, rasterize, save_frame, scene_path
from scenegen.metrics import ImagePair, psnr, ssim
from scenegen.storage import FrameStore

from .lifting import ReconConfig, depth_stub, lift_to_gaussians
from .scene import SceneSpec, ray_cast
from .trajectory import TrajectorySpec, estimate_pose_stub

logger = logging.getLogger(__name__)


def render_ground_truth(scene: SceneSpec, trajectory: TrajectorySpec) -> FrameStore:
    """Frames of the synthetic scene along the trajectory (the ground-truth input path)."""
    frames = [
        [ray_cast(scene, estimate_pose_stub(t, v, trajectory))[0] for v in range(trajectory.views)]
        for t in range(trajectory.frames)
    ]
    return FrameStore.from_nested(frames)


def _lift_timestep(frames: FrameStore, t: int, cfg: ReconConfig, trajectory: TrajectorySpec,
                   scene: SceneSpec, alpha: float) -> List[FrameGaussians]:
    parts = []
    for view in range(frames.views):
        cam = estimate_pose_stub(t, view, trajectory)
        parts.append(lift_to_gaussians(frames.get(t, view), depth_stub(scene, cam), cam, cfg, alpha=alpha, t=t))
    return parts


def reconstruct_frame(frames: FrameStore, t: int, cfg: ReconConfig, trajectory: TrajectorySpec,
                      scene: SceneSpec, include_center: bool = True) -> FrameGaussians:
    """Gaussians of timestep t from the frames at t - delta, t and t + delta.

    With `include_center` False (held-out evaluation) only the two neighbours
    are read, at full `base_alpha`; otherwise neighbours are attenuated by
    `neighbor_weight` and skipped entirely when it is 0.
    """
    before, after = t - cfg.delta, t + cfg.delta
    if not frames.has_timestep(before) or not frames.has_timestep(after):
        raise BoundaryError(f"timestep {t} needs frames {before} and {after}; have [0, {frames.timesteps})")

    parts: List[FrameGaussians] = []
    if include_center:
        neighbor_alpha = cfg.base_alpha * cfg.neighbor_weight
        parts += _lift_timestep(frames, t, cfg, trajectory, scene, cfg.base_alpha)
    else:
        neighbor_alpha = cfg.base_alpha
    if neighbor_alpha > 0:
        for neighbor in (before, after):
            parts += _lift_timestep(frames, neighbor, cfg, trajectory, scene, neighbor_alpha)
    return FrameGaussians.concatenate(t, parts)


def interior_timesteps(total: int, delta: int) -> List[int]:
    if total < 2 * delta + 1:
        raise ConfigurationError(f"{total} frames cannot hold a triplet with delta {delta}; need {2 * delta + 1}",
                                 key="recon.delta")
    return list(range(delta, total - delta))


def reconstruct_sequence(frames: FrameStore, cfg: ReconConfig, trajectory: TrajectorySpec, scene: SceneSpec,
                         output_dir: Optional[Path] = None, include_center: bool = True,
                         show_progress: bool = False) -> List[FrameGaussians]:
    """One FrameGaussians per interior timestep, in timestep order.

    Scene files are written only after every timestep reconstructed, so a bad
    input frame leaves no partial output behind.
    """
    timesteps = interior_timesteps(frames.timesteps, cfg.delta)

    def build(t: int) -> FrameGaussians:
        return reconstruct_frame(frames, t, cfg, trajectory, scene, include_center=include_center)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            recon = list(tqdm(pool.map(build, timesteps), total=len(timesteps), desc="reconstructing",
                              disable=not show_progress, leave=False))
    else:
        recon = [build(t) for t in tqdm(timesteps, desc="reconstructing", disable=not show_progress, leave=False)]

    if output_dir is not None:
        for fg in recon:
            save_frame(fg, scene_path(output_dir, fg.t))
    logger.info("reconstructed %d timesteps (%d gaussians total)", len(recon), sum(len(fg) for fg in recon))
    return recon


@dataclass
class ViewScore:
    view: int
    psnr: float
    ssim: float


@dataclass
class NovelViewResult:
    t: int
    views: List[ViewScore] = field(default_factory=list)

    @property
    def mean_psnr(self) -> float:
        return sum(v.psnr for v in self.views) / len(self.views)

    @property
    def mean_ssim(self) -> float:
        return sum(v.ssim for v in self.views) / len(self.views)

    def to_record(self) -> Dict:
        return {"t": self.t, "views": [vars(v) for v in self.views],
                "mean_psnr": self.mean_psnr, "mean_ssim": self.mean_ssim}


def novel_view_eval(recon: Sequence[FrameGaussians], held_out: FrameStore, t: int, trajectory: TrajectorySpec,
                    cfg: ReconConfig) -> NovelViewResult:
    """Render timestep t from its own cameras and score against the held-out frames."""
    by_t = {fg.t: fg for fg in recon}
    if t not in by_t:
        raise BoundaryError(f"no reconstruction for timestep {t}")
    result = NovelViewResult(t=t)
    for view in range(held_out.views):
        cam = estimate_pose_stub(t, view, trajectory)
        rendered = rasterize(by_t[t], cam, background=cfg.background, tile_size=cfg.tile_size).color
        pair = ImagePair(reference=held_out.get(t, view), candidate=rendered)
        result.views.append(ViewScore(view=view, psnr=psnr(pair), ssim=ssim(pair)))
    return result


def evaluate_interpolation(frames: FrameStore, cfg: ReconConfig, trajectory: TrajectorySpec,
                           scene: SceneSpec, show_progress: bool = False) -> List[NovelViewResult]:
    """Held-out protocol: rebuild every interior t from its neighbours only, then score t."""
    results = []
    for t in tqdm(interior_timesteps(frames.timesteps, cfg.delta), desc="evaluating",
                  disable=not show_progress, leave=False):
        seen = len(frames.accessed)
        fg = reconstruct_frame(frames, t, cfg, trajectory, scene, include_center=False)
        if any(step == t for step, _ in frames.accessed[seen:]):
            raise InvariantViolation(f"held-out reconstruction of timestep {t} read its own frames")
        results.append(novel_view_eval([fg], frames, t, trajectory, cfg))
        logger.info("held-out t=%d: psnr=%.2f ssim=%.4f", t, results[-1].mean_psnr, results[-1].mean_ssim)
    return results
