"""Gaussian primitives, per-frame sets and pinhole cameras.

Cameras follow the OpenCV convention: x right, y down, z forward, pixel
centers at integer coordinates. `R` and `trans` map world points into the
camera frame: x_cam = R @ x_world + trans.
"""
import math
from dataclasses import dataclass, field
from typing import Iterator, List, Sequence

import numpy as np

from scenegen.errors import DimensionError, InvariantViolation
from scenegen.numerics import Tensor

QUATERNION_TOLERANCE = 1e-9


def quaternion_to_matrix(q: Tensor) -> Tensor:
    """(w, x, y, z) unit quaternions [..., 4] -> rotation matrices [..., 3, 3]."""
    q = np.asarray(q, dtype=np.float64)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)], axis=-1),
            np.stack([2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)], axis=-1),
            np.stack([2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)], axis=-1),
        ],
        axis=-2,
    )


def quaternion_multiply(a: Tensor, b: Tensor) -> Tensor:
    aw, ax, ay, az = np.moveaxis(np.asarray(a, dtype=np.float64), -1, 0)
    bw, bx, by, bz = np.moveaxis(np.asarray(b, dtype=np.float64), -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def matrix_to_quaternion(r: Tensor) -> Tensor:
    """Rotation matrix -> (w, x, y, z) unit quaternion with w >= 0."""
    m = np.asarray(r, dtype=np.float64)
    trace = np.trace(m)
    if trace > 0:
        s = 2.0 * math.sqrt(trace + 1.0)
        q = [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
    else:
        i = int(np.argmax(np.diag(m)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = 2.0 * math.sqrt(1.0 + m[i, i] - m[j, j] - m[k, k])
        q = [0.0] * 4
        q[0] = (m[k, j] - m[j, k]) / s
        q[1 + i] = 0.25 * s
        q[1 + j] = (m[j, i] + m[i, j]) / s
        q[1 + k] = (m[k, i] + m[i, k]) / s
    q = np.array(q)
    q = q / np.linalg.norm(q)
    return -q if q[0] < 0 else q


@dataclass(frozen=True)
class Gaussian3D:
    mu: Tensor
    scale: Tensor
    rotation: Tensor  # (w, x, y, z)
    alpha: float
    color: Tensor

    def __post_init__(self):
        for name in ("mu", "scale", "rotation", "color"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        if self.mu.shape != (3,) or self.scale.shape != (3,) or self.color.shape != (3,) or self.rotation.shape != (4,):
            raise DimensionError("Gaussian3D needs 3-vectors for mu, scale, color and a 4-vector rotation")
        if not np.all(self.scale > 0):
            raise InvariantViolation(f"scales must be positive, got {self.scale}")
        if abs(np.linalg.norm(self.rotation) - 1.0) > QUATERNION_TOLERANCE:
            raise InvariantViolation(f"rotation quaternion is not unit: {self.rotation}")
        if not 0.0 <= self.alpha <= 1.0:
            raise InvariantViolation(f"alpha {self.alpha} outside [0, 1]")

    def covariance(self) -> Tensor:
        r = quaternion_to_matrix(self.rotation)
        return r @ np.diag(self.scale ** 2) @ r.T


@dataclass(eq=False)
class FrameGaussians:
    """The Gaussian set of one timestep, stored as parallel arrays."""

    t: int
    means: Tensor  # [N, 3]
    scales: Tensor  # [N, 3]
    rotations: Tensor  # [N, 4]
    alphas: Tensor  # [N]
    colors: Tensor  # [N, 3]

    def __post_init__(self):
        n = len(self.alphas)
        self.means = np.ascontiguousarray(self.means, dtype=np.float64).reshape(n, 3)
        self.scales = np.ascontiguousarray(self.scales, dtype=np.float64).reshape(n, 3)
        self.rotations = np.ascontiguousarray(self.rotations, dtype=np.float64).reshape(n, 4)
        self.alphas = np.ascontiguousarray(self.alphas, dtype=np.float64).reshape(n)
        self.colors = np.ascontiguousarray(self.colors, dtype=np.float64).reshape(n, 3)
        if n == 0:
            return
        if not np.all(self.scales > 0):
            raise InvariantViolation("all gaussian scales must be positive")
        if np.max(np.abs(np.linalg.norm(self.rotations, axis=1) - 1.0)) > QUATERNION_TOLERANCE:
            raise InvariantViolation("rotation quaternions must be unit length")
        if np.any(self.alphas < 0) or np.any(self.alphas > 1):
            raise InvariantViolation("alphas must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.alphas)

    def __iter__(self) -> Iterator[Gaussian3D]:
        for i in range(len(self)):
            yield Gaussian3D(self.means[i], self.scales[i], self.rotations[i], float(self.alphas[i]), self.colors[i])

    @classmethod
    def empty(cls, t: int = 0) -> "FrameGaussians":
        return cls(t, np.zeros((0, 3)), np.zeros((0, 3)), np.zeros((0, 4)), np.zeros(0), np.zeros((0, 3)))

    @classmethod
    def from_gaussians(cls, t: int, gaussians: Sequence[Gaussian3D]) -> "FrameGaussians":
        if not gaussians:
            return cls.empty(t)
        return cls(
            t,
            np.stack([g.mu for g in gaussians]),
            np.stack([g.scale for g in gaussians]),
            np.stack([g.rotation for g in gaussians]),
            np.array([g.alpha for g in gaussians]),
            np.stack([g.color for g in gaussians]),
        )

    @classmethod
    def concatenate(cls, t: int, parts: Sequence["FrameGaussians"]) -> "FrameGaussians":
        parts = [p for p in parts if len(p)]
        if not parts:
            return cls.empty(t)
        return cls(
            t,
            np.concatenate([p.means for p in parts]),
            np.concatenate([p.scales for p in parts]),
            np.concatenate([p.rotations for p in parts]),
            np.concatenate([p.alphas for p in parts]),
            np.concatenate([p.colors for p in parts]),
        )

    def covariances(self) -> Tensor:
        r = quaternion_to_matrix(self.rotations)
        return r @ (self.scales[:, :, None] ** 2 * np.swapaxes(r, -1, -2))


@dataclass(frozen=True, eq=False)
class Camera:
    fx: float
    fy: float
    cx: float
    cy: float
    R: Tensor = field(default_factory=lambda: np.eye(3))
    trans: Tensor = field(default_factory=lambda: np.zeros(3))
    width: int = 64
    height: int = 64
    near: float = 0.01
    far: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, "R", np.asarray(self.R, dtype=np.float64))
        object.__setattr__(self, "trans", np.asarray(self.trans, dtype=np.float64))
        if self.R.shape != (3, 3) or self.trans.shape != (3,):
            raise DimensionError("camera R must be 3x3 and trans a 3-vector")
        if np.max(np.abs(self.R.T @ self.R - np.eye(3))) > 1e-9:
            raise InvariantViolation("camera rotation is not orthonormal")
        if not 0 < self.near < self.far:
            raise InvariantViolation(f"need 0 < near < far, got {self.near}, {self.far}")
        if self.width < 1 or self.height < 1:
            raise DimensionError("camera resolution must be positive")

    @classmethod
    def from_fov(cls, width: int, height: int, fov_x_deg: float, R=None, trans=None, near=0.01, far=100.0) -> "Camera":
        fx = width / (2.0 * math.tan(math.radians(fov_x_deg) / 2.0))
        return cls(
            fx=fx, fy=fx, cx=(width - 1) / 2.0, cy=(height - 1) / 2.0,
            R=np.eye(3) if R is None else R, trans=np.zeros(3) if trans is None else trans,
            width=width, height=height, near=near, far=far,
        )

    @property
    def center(self) -> Tensor:
        """Camera position in world coordinates."""
        return -self.R.T @ self.trans

    def world_to_camera(self, points: Tensor) -> Tensor:
        return points @ self.R.T + self.trans

    def camera_to_world(self, points: Tensor) -> Tensor:
        return (points - self.trans) @ self.R

    def pixel_grid(self):
        """Integer pixel-center coordinates (u, v), each [height, width]."""
        return np.meshgrid(np.arange(self.width, dtype=np.float64), np.arange(self.height, dtype=np.float64))

    def rays(self) -> Tensor:
        """Camera-frame ray directions [height, width, 3] with unit z component."""
        u, v = self.pixel_grid()
        return np.stack([(u - self.cx) / self.fx, (v - self.cy) / self.fy, np.ones_like(u)], axis=-1)


@dataclass
class RenderOutput:
    color: Tensor  # [H, W, 3]
    depth: Tensor  # [H, W]
    transmittance: Tensor  # [H, W]
    weight_sum: Tensor  # [H, W]
