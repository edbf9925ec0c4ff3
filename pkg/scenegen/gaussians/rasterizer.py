"""Tile-based front-to-back alpha compositing, plus a whole-image reference renderer.

Both renderers walk the same globally depth-sorted list and evaluate the same
truncated footprint, so they agree pixel for pixel; tiles only limit which
gaussians each pixel block has to visit.
"""
import logging
from typing import Sequence

import numpy as np

from scenegen.numerics import Tensor

from .primitives import Camera, FrameGaussians, RenderOutput
from .projection import CUTOFF_SQ, ProjectedSet, project_frame

logger = logging.getLogger(__name__)

TILE_SIZE = 16
MIN_TRANSMITTANCE = 1e-4
DEPTH_EPS = 1e-12


def footprint(dx: Tensor, dy: Tensor, conic: Tensor) -> Tensor:
    """Unnormalized 2D gaussian at pixel offsets, zero beyond 3 sigma."""
    maha = conic[0] * dx * dx + 2.0 * conic[1] * dx * dy + conic[2] * dy * dy
    return np.where(maha > CUTOFF_SQ, 0.0, np.exp(-0.5 * maha))


class _Accumulator:
    def __init__(self, shape):
        self.color = np.zeros(shape + (3,))
        self.depth = np.zeros(shape)
        self.weight = np.zeros(shape)
        self.transmittance = np.ones(shape)

    def composite(self, u: Tensor, v: Tensor, proj: ProjectedSet, i: int) -> None:
        active = self.transmittance >= MIN_TRANSMITTANCE
        g = footprint(u - proj.mean2d[i, 0], v - proj.mean2d[i, 1], proj.conic[i])
        a = np.where(active, proj.alpha[i] * g, 0.0)
        w = a * self.transmittance
        self.color += w[..., None] * proj.color[i]
        self.depth += w * proj.depth[i]
        self.weight += w
        self.transmittance = self.transmittance * (1.0 - a)

    def finish(self, background: Tensor) -> RenderOutput:
        color = self.color + self.transmittance[..., None] * background
        depth = self.depth / np.maximum(self.weight, DEPTH_EPS)
        return RenderOutput(color=color, depth=depth, transmittance=self.transmittance, weight_sum=self.weight)


def _tile_lists(proj: ProjectedSet, order: Tensor, tiles_x: int, tiles_y: int, tile: int):
    lists = [[[] for _ in range(tiles_x)] for _ in range(tiles_y)]
    for i in order:
        mx, my = proj.mean2d[i]
        r = proj.radius[i]
        x0 = max(int(np.floor((mx - r) / tile)), 0)
        x1 = min(int(np.floor((mx + r) / tile)), tiles_x - 1)
        y0 = max(int(np.floor((my - r) / tile)), 0)
        y1 = min(int(np.floor((my + r) / tile)), tiles_y - 1)
        for ty in range(y0, y1 + 1):
            for tx in range(x0, x1 + 1):
                lists[ty][tx].append(i)
    return lists


def rasterize(fg: FrameGaussians, cam: Camera, background: Sequence[float] = (0.0, 0.0, 0.0),
              tile_size: int = TILE_SIZE) -> RenderOutput:
    background = np.asarray(background, dtype=np.float64)
    proj = project_frame(fg, cam)
    acc = _Accumulator((cam.height, cam.width))
    if len(proj) == 0:
        return acc.finish(background)

    u_full, v_full = cam.pixel_grid()
    tiles_x = -(-cam.width // tile_size)
    tiles_y = -(-cam.height // tile_size)
    lists = _tile_lists(proj, proj.depth_order(), tiles_x, tiles_y, tile_size)

    for ty in range(tiles_y):
        for tx in range(tiles_x):
            ys = slice(ty * tile_size, min((ty + 1) * tile_size, cam.height))
            xs = slice(tx * tile_size, min((tx + 1) * tile_size, cam.width))
            tile = _Accumulator((ys.stop - ys.start, xs.stop - xs.start))
            u, v = u_full[ys, xs], v_full[ys, xs]
            for i in lists[ty][tx]:
                tile.composite(u, v, proj, i)
                if np.all(tile.transmittance < MIN_TRANSMITTANCE):
                    break
            acc.color[ys, xs] = tile.color
            acc.depth[ys, xs] = tile.depth
            acc.weight[ys, xs] = tile.weight
            acc.transmittance[ys, xs] = tile.transmittance
    return acc.finish(background)


def rasterize_reference(fg: FrameGaussians, cam: Camera, background: Sequence[float] = (0.0, 0.0, 0.0)) -> RenderOutput:
    """Every pixel visits every visible gaussian in depth order; no tiling."""
    background = np.asarray(background, dtype=np.float64)
    proj = project_frame(fg, cam)
    acc = _Accumulator((cam.height, cam.width))
    u, v = cam.pixel_grid()
    for i in proj.depth_order():
        acc.composite(u, v, proj, i)
    return acc.finish(background)
