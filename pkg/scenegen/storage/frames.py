"""RGB frame files and the frame store the reconstruction stage reads from."""
import io
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set, Tuple

import numpy as np
from PIL import Image, UnidentifiedImageError

from scenegen.errors import BoundaryError, DimensionError, StorageError
from scenegen.numerics import Tensor

from .files import PathLike, atomic_write_bytes, read_bytes

logger = logging.getLogger(__name__)

FrameKey = Tuple[int, int]


def frame_filename(t: int, view: int) -> str:
    return f"frame_{t}_{view}.png"


def encode_png(image: Tensor) -> bytes:
    if image.ndim != 3 or image.shape[2] != 3:
        raise DimensionError(f"expected an [H, W, 3] image, got {image.shape}")
    pixels = np.clip(np.round(np.asarray(image) * 255.0), 0, 255).astype(np.uint8)
    buffer = io.BytesIO()
    Image.fromarray(pixels).save(buffer, format="PNG")
    return buffer.getvalue()


def decode_png(payload: bytes, source=None) -> Tensor:
    try:
        with Image.open(io.BytesIO(payload)) as img:
            pixels = np.asarray(img.convert("RGB"), dtype=np.float64)
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError, EOFError) as exc:
        raise StorageError(f"unreadable frame image: {exc}", path=source) from exc
    return pixels / 255.0


def save_frames(frames: List[List[Tensor]], directory: PathLike) -> List[Path]:
    """Write frames[t][view] as PNG files; returns the written paths in (t, view) order."""
    directory = Path(directory)
    written = []
    for t, views in enumerate(frames):
        for view, image in enumerate(views):
            written.append(atomic_write_bytes(directory / frame_filename(t, view), encode_png(image)))
    logger.info("wrote %d frame files to %s", len(written), directory)
    return written


class FrameStore:
    """Frames indexed by (timestep, view), with a log of every pixel read.

    A store is either in memory or backed by a directory of PNG files that
    are decoded on first access.
    """

    def __init__(self, frames: Optional[Dict[FrameKey, Tensor]] = None, directory: Optional[Path] = None,
                 timesteps: int = 0, views: int = 0):
        self._frames: Dict[FrameKey, Tensor] = dict(frames or {})
        self.directory = directory
        keys = self._frames.keys()
        self.timesteps = timesteps or (max(t for t, _ in keys) + 1 if keys else 0)
        self.views = views or (max(v for _, v in keys) + 1 if keys else 0)
        self.accessed: List[FrameKey] = []

    @classmethod
    def from_nested(cls, frames: List[List[Tensor]]) -> "FrameStore":
        return cls({(t, v): img for t, views in enumerate(frames) for v, img in enumerate(views)},
                   timesteps=len(frames), views=len(frames[0]) if frames else 0)

    @classmethod
    def from_directory(cls, directory: PathLike, timesteps: int, views: int) -> "FrameStore":
        directory = Path(directory)
        missing = [
            frame_filename(t, v) for t in range(timesteps) for v in range(views)
            if not (directory / frame_filename(t, v)).is_file()
        ]
        if missing:
            raise StorageError(f"missing frame file {missing[0]} ({len(missing)} missing)", path=directory / missing[0])
        return cls(directory=directory, timesteps=timesteps, views=views)

    def has_timestep(self, t: int) -> bool:
        return 0 <= t < self.timesteps

    def get(self, t: int, view: int) -> Tensor:
        if not self.has_timestep(t) or not 0 <= view < self.views:
            raise BoundaryError(f"no frame at timestep {t}, view {view}")
        self.accessed.append((t, view))
        key = (t, view)
        if key not in self._frames:
            path = self.directory / frame_filename(t, view)
            self._frames[key] = decode_png(read_bytes(path), source=path)
        return self._frames[key]

    def timesteps_read(self) -> Set[int]:
        return {t for t, _ in self.accessed}

    def views_at(self, t: int) -> List[Tensor]:
        return [self.get(t, v) for v in range(self.views)]

    def keys(self) -> Iterable[FrameKey]:
        return ((t, v) for t in range(self.timesteps) for v in range(self.views))
