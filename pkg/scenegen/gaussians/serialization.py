"""Binary scene files for FrameGaussians.

Layout (little endian): 4-byte magic b"SGF1", int64 timestep, uint64 count,
then `count` records of 14 float64 values: mu (3), scale (3),
quaternion w x y z (4), alpha (1), rgb (3).
"""
import struct
from pathlib import Path

import numpy as np

from scenegen.errors import StorageError
from scenegen.storage.files import PathLike, atomic_write_bytes, read_bytes

from .primitives import FrameGaussians

MAGIC = b"SGF1"
_HEADER = struct.Struct("<4sqQ")
RECORD_WIDTH = 14


def serialize_frame(fg: FrameGaussians) -> bytes:
    records = np.concatenate(
        [fg.means, fg.scales, fg.rotations, fg.alphas[:, None], fg.colors], axis=1
    ) if len(fg) else np.zeros((0, RECORD_WIDTH))
    return _HEADER.pack(MAGIC, int(fg.t), len(fg)) + records.astype("<f8").tobytes()


def deserialize_frame(payload: bytes, source=None) -> FrameGaussians:
    if len(payload) < _HEADER.size:
        raise StorageError("truncated scene file header", path=source)
    magic, t, count = _HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise StorageError(f"bad scene file magic {magic!r}", path=source)
    expected = _HEADER.size + count * RECORD_WIDTH * 8
    if len(payload) != expected:
        raise StorageError(f"scene file holds {len(payload)} bytes, expected {expected}", path=source)
    records = np.frombuffer(payload, dtype="<f8", offset=_HEADER.size).reshape(count, RECORD_WIDTH).astype(np.float64)
    return FrameGaussians(
        t=t,
        means=records[:, 0:3],
        scales=records[:, 3:6],
        rotations=records[:, 6:10],
        alphas=records[:, 10],
        colors=records[:, 11:14],
    )


def scene_path(directory: PathLike, t: int) -> Path:
    return Path(directory) / f"scene_{t:04d}.sgf"


def save_frame(fg: FrameGaussians, path: PathLike) -> Path:
    return atomic_write_bytes(path, serialize_frame(fg))


def load_frame(path: PathLike) -> FrameGaussians:
    return deserialize_frame(read_bytes(path), source=path)
