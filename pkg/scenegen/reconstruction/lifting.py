"""Depth maps and the deterministic pixel-to-Gaussian lifter."""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from scenegen.errors import DimensionError, InvariantViolation
from scenegen.gaussians import Camera, FrameGaussians
from scenegen.numerics import Tensor

from .scene import SceneSpec, ray_cast


@dataclass(frozen=True, eq=False)
class DepthMap:
    values: Tensor  # [H, W], meters

    def __post_init__(self):
        if self.values.ndim != 2:
            raise DimensionError(f"depth map must be 2-D, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)) or not np.all(self.values > 0):
            raise InvariantViolation("depth values must be finite and positive")

    @property
    def shape(self):
        return self.values.shape


class ReconConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    delta: int = Field(1, ge=1)
    per_pixel_stride: int = Field(1, ge=1)
    base_alpha: float = Field(1.0, gt=0.0, le=1.0)
    scale_factor: float = Field(0.25, gt=0.0)
    neighbor_weight: float = Field(0.5, ge=0.0, lt=1.0)
    tile_size: int = Field(16, ge=1)
    workers: int = Field(1, ge=1)
    background: Tuple[float, float, float] = (0.0, 0.0, 0.0)


def depth_stub(scene: SceneSpec, cam: Camera) -> DepthMap:
    """Exact z-depth of the synthetic scene, standing in for a learned depth network."""
    _, depth = ray_cast(scene, cam)
    return DepthMap(depth)


def lift_to_gaussians(image: Tensor, depth: DepthMap, cam: Camera, cfg: ReconConfig,
                      alpha: Optional[float] = None, t: int = 0) -> FrameGaussians:
    """One isotropic gaussian per sampled pixel, placed at the unprojected depth.

    Scale is `scale_factor` pixel footprints at the pixel's depth, so every
    splat covers about the same screen area from the source camera.
    """
    if image.shape[:2] != depth.shape or image.shape[:2] != (cam.height, cam.width):
        raise DimensionError(
            f"image {image.shape[:2]}, depth {depth.shape} and camera {(cam.height, cam.width)} must match"
        )
    s = cfg.per_pixel_stride
    u, v = cam.pixel_grid()
    u, v = u[::s, ::s].ravel(), v[::s, ::s].ravel()
    d = depth.values[::s, ::s].ravel()
    colors = image[::s, ::s].reshape(-1, 3)

    x_cam = np.stack([(u - cam.cx) / cam.fx * d, (v - cam.cy) / cam.fy * d, d], axis=-1)
    n = len(d)
    size = cfg.scale_factor * d / cam.fx
    rotations = np.zeros((n, 4))
    rotations[:, 0] = 1.0
    return FrameGaussians(
        t=t,
        means=cam.camera_to_world(x_cam),
        scales=np.repeat(size[:, None], 3, axis=1),
        rotations=rotations,
        alphas=np.full(n, cfg.base_alpha if alpha is None else alpha),
        colors=np.clip(colors, 0.0, 1.0),
    )
