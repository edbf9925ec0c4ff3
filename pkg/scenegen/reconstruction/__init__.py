from .lifting import DepthMap, ReconConfig, depth_stub, lift_to_gaussians
from .pipeline import (
    NovelViewResult,
    ViewScore,
    evaluate_interpolation,
    interior_timesteps,
    novel_view_eval,
    reconstruct_frame,
    reconstruct_sequence,
    render_ground_truth,
)
from .scene import PlaneSpec, SceneSpec, SphereSpec, Texture, canonical_scene, ray_cast
from .trajectory import TrajectoryKind, TrajectorySpec, estimate_pose_stub, yaw_matrix

__all__ = [
    "DepthMap",
    "NovelViewResult",
    "PlaneSpec",
    "ReconConfig",
    "SceneSpec",
    "SphereSpec",
    "Texture",
    "TrajectoryKind",
    "TrajectorySpec",
    "ViewScore",
    "canonical_scene",
    "depth_stub",
    "estimate_pose_stub",
    "evaluate_interpolation",
    "interior_timesteps",
    "lift_to_gaussians",
    "novel_view_eval",
    "ray_cast",
    "reconstruct_frame",
    "reconstruct_sequence",
    "render_ground_truth",
    "yaw_matrix",
]
