"""Analytic synthetic scenes: textured planes and spheres, ray cast exactly.

Ray parameters are expressed along camera rays with unit z component, so the
hit parameter of a ray is the camera-frame z depth of the hit point.
"""
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from scenegen.gaussians import Camera
from scenegen.numerics import Tensor

Vec3 = Tuple[float, float, float]


class Texture(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    color: Vec3
    amplitude: float = Field(0.1, ge=0.0)
    wavelength: float = Field(3.0, gt=0.0)

    def shade(self, points: Tensor) -> Tensor:
        base = np.asarray(self.color)
        if self.amplitude == 0.0 or points.size == 0:
            return np.broadcast_to(base, points.shape).copy()
        k = 2.0 * np.pi / self.wavelength
        pattern = np.sin(k * points[..., 0] + 0.7 * k * points[..., 2]) * np.cos(k * points[..., 1] - 0.4 * k * points[..., 2])
        phases = np.array([1.0, 0.8, 0.6])
        return np.clip(base + self.amplitude * pattern[..., None] * phases, 0.0, 1.0)


class PlaneSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    point: Vec3
    normal: Vec3
    texture: Texture

    @field_validator("normal")
    @classmethod
    def _unit_normal(cls, value):
        n = np.asarray(value, dtype=np.float64)
        norm = np.linalg.norm(n)
        if norm == 0:
            raise ValueError("plane normal must be non-zero")
        return tuple(float(c) for c in n / norm)


class SphereSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    center: Vec3
    radius: float = Field(gt=0.0)
    texture: Texture


class SceneSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    planes: List[PlaneSpec] = Field(default_factory=list)
    spheres: List[SphereSpec] = Field(default_factory=list)
    background: Vec3 = (0.0, 0.0, 0.0)


def canonical_scene() -> SceneSpec:
    """Closed room seen from the origin: ground, back wall, one sphere; smooth low-contrast textures."""
    return SceneSpec(
        planes=[
            PlaneSpec(point=(0.0, 1.5, 0.0), normal=(0.0, -1.0, 0.0),
                      texture=Texture(color=(0.45, 0.5, 0.4), amplitude=0.12, wavelength=3.0)),
            PlaneSpec(point=(0.0, 0.0, 8.0), normal=(0.0, 0.0, -1.0),
                      texture=Texture(color=(0.55, 0.5, 0.45), amplitude=0.12, wavelength=3.5)),
        ],
        spheres=[
            SphereSpec(center=(0.8, 0.5, 5.0), radius=1.0,
                       texture=Texture(color=(0.6, 0.47, 0.42), amplitude=0.08, wavelength=2.5)),
        ],
    )


def _world_rays(cam: Camera):
    directions = cam.rays() @ cam.R  # rows: R^T d
    return cam.center, directions


def ray_cast(scene: SceneSpec, cam: Camera) -> Tuple[Tensor, Tensor]:
    """(image [H, W, 3], depth [H, W]) of the nearest surface; misses get background and cam.far."""
    origin, dirs = _world_rays(cam)
    depth = np.full(dirs.shape[:2], np.inf)
    color = np.broadcast_to(np.asarray(scene.background, dtype=np.float64), dirs.shape).copy()

    for plane in scene.planes:
        n = np.asarray(plane.normal)
        denom = dirs @ n
        with np.errstate(divide="ignore", invalid="ignore"):
            hit = ((np.asarray(plane.point) - origin) @ n) / denom
        hit = np.where((np.abs(denom) > 1e-12) & (hit > cam.near), hit, np.inf)
        closer = hit < depth
        depth = np.where(closer, hit, depth)
        points = origin + hit[closer][:, None] * dirs[closer]
        color[closer] = plane.texture.shade(points)

    for sphere in scene.spheres:
        oc = origin - np.asarray(sphere.center)
        a = np.sum(dirs * dirs, axis=-1)
        b = 2.0 * (dirs @ oc)
        c = oc @ oc - sphere.radius ** 2
        disc = b * b - 4 * a * c
        root = np.sqrt(np.maximum(disc, 0.0))
        near_hit = (-b - root) / (2 * a)
        far_hit = (-b + root) / (2 * a)
        hit = np.where(near_hit > cam.near, near_hit, far_hit)
        hit = np.where((disc >= 0) & (hit > cam.near), hit, np.inf)
        closer = hit < depth
        depth = np.where(closer, hit, depth)
        points = origin + hit[closer][:, None] * dirs[closer]
        color[closer] = sphere.texture.shade(points)

    beyond = depth >= cam.far
    depth = np.where(beyond, cam.far, depth)
    color[beyond] = np.asarray(scene.background)
    return color, depth
