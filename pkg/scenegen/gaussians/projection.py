"""EWA projection of 3D Gaussians into screen space."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from scenegen.numerics import Tensor

from .primitives import Camera, FrameGaussians, Gaussian3D

# low-pass dilation added to every screen-space covariance, in px^2
DILATION = 0.3
# footprints are cut off beyond this squared Mahalanobis distance (3 sigma)
CUTOFF_SQ = 9.0


@dataclass
class Projection:
    mean2d: Tensor
    cov2d: Tensor
    depth: float


@dataclass
class ProjectedSet:
    """Visible gaussians of a frame in screen space, in input order."""

    index: Tensor  # [M] positions in the source FrameGaussians
    mean2d: Tensor  # [M, 2]
    cov2d: Tensor  # [M, 2, 2]
    conic: Tensor  # [M, 3] (a, b, c) of the inverse covariance
    depth: Tensor  # [M]
    radius: Tensor  # [M] conservative 3-sigma bound in px
    alpha: Tensor
    color: Tensor

    def __len__(self) -> int:
        return len(self.index)

    def depth_order(self) -> Tensor:
        """Near to far; equal depths keep input order."""
        return np.lexsort((self.index, self.depth))


def _screen_covariance(x_cam: Tensor, cov_world: Tensor, cam: Camera) -> Tensor:
    x, y, z = x_cam[..., 0], x_cam[..., 1], x_cam[..., 2]
    zeros = np.zeros_like(z)
    jac = np.stack(
        [
            np.stack([cam.fx / z, zeros, -cam.fx * x / (z * z)], axis=-1),
            np.stack([zeros, cam.fy / z, -cam.fy * y / (z * z)], axis=-1),
        ],
        axis=-2,
    )
    cov_cam = cam.R @ cov_world @ cam.R.T
    cov2d = jac @ cov_cam @ np.swapaxes(jac, -1, -2)
    return cov2d + DILATION * np.eye(2)


def project_gaussian(g: Gaussian3D, cam: Camera) -> Optional[Projection]:
    """Screen-space mean, covariance and depth of one gaussian; None when culled."""
    x_cam = cam.world_to_camera(g.mu)
    if not cam.near < x_cam[2] < cam.far:
        return None
    mean2d = np.array([cam.fx * x_cam[0] / x_cam[2] + cam.cx, cam.fy * x_cam[1] / x_cam[2] + cam.cy])
    return Projection(mean2d=mean2d, cov2d=_screen_covariance(x_cam, g.covariance(), cam), depth=float(x_cam[2]))


def project_frame(fg: FrameGaussians, cam: Camera) -> ProjectedSet:
    x_cam = cam.world_to_camera(fg.means)
    visible = np.nonzero((x_cam[:, 2] > cam.near) & (x_cam[:, 2] < cam.far))[0]
    x_cam = x_cam[visible]
    z = x_cam[:, 2]
    mean2d = np.stack([cam.fx * x_cam[:, 0] / z + cam.cx, cam.fy * x_cam[:, 1] / z + cam.cy], axis=-1)
    cov2d = _screen_covariance(x_cam, fg.covariances()[visible], cam)

    a, b, c = cov2d[:, 0, 0], cov2d[:, 0, 1], cov2d[:, 1, 1]
    det = a * c - b * b
    conic = np.stack([c / det, -b / det, a / det], axis=-1)
    mid = 0.5 * (a + c)
    lambda_max = mid + np.sqrt(np.maximum(mid * mid - det, 0.0))
    radius = np.sqrt(CUTOFF_SQ * lambda_max)
    return ProjectedSet(
        index=visible,
        mean2d=mean2d,
        cov2d=cov2d,
        conic=conic,
        depth=z,
        radius=radius,
        alpha=fg.alphas[visible],
        color=fg.colors[visible],
    )
