"""Prompt and BEV-layout conditioning for the toy transformer."""
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from scenegen.errors import ConfigurationError
from scenegen.numerics import Tensor, derive_seed, seeded_normal

PAD_TOKEN = "<pad>"


class BoxSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    center_xy: Tuple[float, float]
    size_wl: Tuple[float, float]  # (width, length) in meters; length runs along yaw
    yaw: float = 0.0
    class_id: int = Field(0, ge=0)


class GridSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    extent_m: float = Field(40.0, gt=0)
    cells: int = Field(16, ge=1)
    classes: int = Field(3, ge=1)

    def cell_centers(self) -> np.ndarray:
        step = self.extent_m / self.cells
        return -self.extent_m / 2 + (np.arange(self.cells) + 0.5) * step


def encode_text_stub(prompt: str, dim: int = 64) -> Tensor:
    """One seeded standard-normal row per whitespace token, keyed by (position, token)."""
    tokens = prompt.lower().split() or [PAD_TOKEN]
    return np.stack([seeded_normal((dim,), derive_seed("text", i, tok)) for i, tok in enumerate(tokens)])


def rasterize_bev(boxes: Sequence[BoxSpec], grid: GridSpec) -> Tensor:
    """Paint oriented boxes into a [classes, cells, cells] occupancy raster.

    Row index follows y, column index follows x. A cell is set when its
    center lies inside the rectangle, boundary included.
    """
    centers = grid.cell_centers()
    xs, ys = np.meshgrid(centers, centers)  # [row=y, col=x]
    raster = np.zeros((grid.classes, grid.cells, grid.cells))
    eps = 1e-9
    for box in boxes:
        if box.class_id >= grid.classes:
            raise ConfigurationError(f"class_id {box.class_id} >= grid classes {grid.classes}", key="boxes.class_id")
        width, length = box.size_wl
        cos, sin = math.cos(box.yaw), math.sin(box.yaw)
        dx = xs - box.center_xy[0]
        dy = ys - box.center_xy[1]
        along = dx * cos + dy * sin
        lateral = -dx * sin + dy * cos
        inside = (np.abs(along) <= length / 2 + eps) & (np.abs(lateral) <= width / 2 + eps)
        raster[box.class_id][inside] = 1.0
    return raster


@dataclass(frozen=True)
class Conditioning:
    text_embedding: Tensor  # [n_text, dim]
    bev_raster: Tensor  # [classes, cells, cells]
    combined: Tensor  # [n_text + cells*cells, dim]

    @property
    def tokens(self) -> int:
        return self.combined.shape[0]

    def unconditional(self) -> Tensor:
        """Null conditioning sequence of the same length (zero tokens)."""
        return np.zeros_like(self.combined)


def bev_tokens(raster: Tensor, dim: int) -> Tensor:
    classes, rows, cols = raster.shape
    projection = seeded_normal((classes, dim), derive_seed("bev", "projection", classes, dim))
    positional = 0.1 * seeded_normal((rows * cols, dim), derive_seed("bev", "position", rows, cols, dim))
    occupancy = raster.reshape(classes, rows * cols).T
    return occupancy @ projection + positional


def build_conditioning(prompt: str, boxes: List[BoxSpec], grid: GridSpec, dim: int = 64) -> Conditioning:
    text = encode_text_stub(prompt, dim)
    raster = rasterize_bev(boxes, grid)
    return Conditioning(text_embedding=text, bev_raster=raster, combined=np.concatenate([text, bev_tokens(raster, dim)]))
