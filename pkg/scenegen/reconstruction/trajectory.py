import math
from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from scenegen.errors import BoundaryError
from scenegen.gaussians import Camera
from scenegen.numerics import Tensor


class TrajectoryKind(str, Enum):
    STATIC = "static"
    LINEAR = "linear"
    CIRCULAR = "circular"


def yaw_matrix(yaw: float) -> Tensor:
    """Camera-to-world rotation about the (downward) y axis; yaw 0 looks along +z."""
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


class TrajectorySpec(BaseModel):
    """Scripted camera rig: one pose per (frame, view)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: TrajectoryKind = TrajectoryKind.STATIC
    frames: int = Field(8, ge=1)
    view_yaws_deg: List[float] = Field(default_factory=lambda: [-10.0, 10.0])
    width: int = Field(96, ge=1)
    height: int = Field(64, ge=1)
    fov_x_deg: float = Field(60.0, gt=0.0, lt=180.0)
    origin: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    velocity: Tuple[float, float, float] = (0.0, 0.0, 0.1)
    pivot: Tuple[float, float, float] = (0.0, 0.0, 5.0)
    radius: float = Field(5.0, gt=0.0)
    angular_step_deg: float = 2.0
    near: float = Field(0.05, gt=0.0)
    far: float = Field(100.0, gt=0.0)

    @model_validator(mode="after")
    def _check(self):
        if not self.view_yaws_deg:
            raise ValueError("view_yaws_deg needs at least one view")
        if self.near >= self.far:
            raise ValueError("near must be smaller than far")
        return self

    @property
    def views(self) -> int:
        return len(self.view_yaws_deg)

    def at_resolution(self, width: int, height: int) -> "TrajectorySpec":
        return self.model_copy(update={"width": width, "height": height})

    def rig_pose(self, frame: int) -> Tuple[Tensor, float]:
        """(camera center, heading yaw) of the rig at `frame`."""
        if self.kind is TrajectoryKind.STATIC:
            return np.asarray(self.origin, dtype=np.float64), 0.0
        if self.kind is TrajectoryKind.LINEAR:
            return np.asarray(self.origin) + frame * np.asarray(self.velocity), 0.0
        theta = math.radians(frame * self.angular_step_deg)
        heading = np.array([math.sin(theta), 0.0, math.cos(theta)])
        return np.asarray(self.pivot) - self.radius * heading, theta


def estimate_pose_stub(frame_index: int, view_index: int, trajectory: TrajectorySpec) -> Camera:
    """Scripted pose playback standing in for a learned pose network."""
    if not 0 <= frame_index < trajectory.frames or not 0 <= view_index < trajectory.views:
        raise BoundaryError(f"trajectory has no pose for frame {frame_index}, view {view_index}")
    center, heading = trajectory.rig_pose(frame_index)
    R = yaw_matrix(heading + math.radians(trajectory.view_yaws_deg[view_index])).T
    return Camera.from_fov(
        trajectory.width, trajectory.height, trajectory.fov_x_deg,
        R=R, trans=-R @ center, near=trajectory.near, far=trajectory.far,
    )
